#include "doctest.h"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

std::string quote(const std::string& s)
{
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Run run(const std::vector<std::string>& args)
{
    std::string cmd = ARTIFACT_BIN;
    for (auto& a : args) cmd += " " + quote(a);
    cmd += " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t k = fread(buf, 1, sizeof buf, p)) out.append(buf, k);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& body)
{
    auto path = std::filesystem::temp_directory_path() / ("isect_cli_" + name);
    std::ofstream(path) << body;
    return path.string();
}

}  // namespace

TEST_CASE("infer")
{
    auto r = run({"infer", "(\\x. x x)(\\y. y)", "--calculus", "lambda", "--json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["n"] == 2);
    CHECK(j["d"] == 0);
    CHECK(j.contains("derivation"));

    auto ls = nlohmann::json::parse(run({"infer", "(\\x. x x)(\\y. y)", "--calculus", "ls", "--json"}).out);
    CHECK(ls["n"] == 2);

    auto lxr = run({"infer", "\\f. \\x. f x x", "--calculus", "lxr", "--json"});
    REQUIRE(lxr.code == 0);
    CHECK(nlohmann::json::parse(lxr.out)["term"].get<std::string>().find("C[") != std::string::npos);
}

TEST_CASE("verify")
{
    auto r = run({"verify", "\\x. x", "--calculus", "lambda", "--json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["agree"] == true);
    CHECK(j["longest"] == 0);
    CHECK(j["runtime_ms"].is_null());
    for (auto key : {"term", "calculus", "n", "d", "var_count", "inter_count", "n1", "n2", "longest", "agree", "graph_nodes", "runtime_ms"})
        CHECK(j.contains(key));

    CHECK(nlohmann::json::parse(run({"verify", "\\x. x", "--json", "--timing"}).out)["runtime_ms"].is_number());

    auto plain = run({"verify", "\\x. x"});
    CHECK(plain.code == 0);
    CHECK(plain.out.find("agree") != std::string::npos);
}

TEST_CASE("batch input from a file")
{
    auto path = temp_file("batch.txt", "# two terms\n(\\x. x x)(\\y. y)\n\n\\x. (\\y. y) x   # trailing\n");
    auto r = run({"verify", "@" + path, "--json", "--jobs", "2"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.size() == 2);
    CHECK(j[0]["longest"] == 2);
    CHECK(j[1]["longest"] == 1);
    CHECK(run({"predict", "@" + path}).code == 0);
    CHECK(run({"infer", "@" + path}).code == 2);
}

TEST_CASE("exit codes")
{
    CHECK(run({"normalize", "(\\x. x x)(\\x. x x)", "--fuel", "50"}).code == 1);
    CHECK(run({"normalize", "(\\x. x"}).code == 2);
    CHECK(run({"infer", "\\x. x", "--calculus", "sk"}).code == 2);
    CHECK(run({"normalize", "\\x. x", "--relation", "eta"}).code == 2);
    CHECK(run({"normalize", "(\\x. x) y", "--relation", "bs", "--strategy", "perpetual"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"verify", "@/nonexistent/terms.txt"}).code == 2);
    CHECK(run({"check", "\\x. x x", "--calculus", "lxr"}).code == 1);
    CHECK(run({"measure", "{not json"}).code == 2);
}

TEST_CASE("normalize and trace")
{
    auto n = nlohmann::json::parse(run({"normalize", "(\\x. x x)(\\y. y)", "--relation", "bs", "--json"}).out);
    CHECK(n["normal_form"] == "\\y. y");

    auto t = run({"trace", "(\\x. x x)(\\y. y)", "--json"});
    REQUIRE(t.code == 0);
    std::istringstream in(t.out);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j["rule"] == "Beta");
        CHECK(j["pos"].is_array());
        ++lines;
    }
    CHECK(lines == 2);

    auto partial = run({"trace", "(\\x. x x)(\\x. x x)", "--fuel", "3", "--json"});
    CHECK(partial.code == 1);
    CHECK(std::count(partial.out.begin(), partial.out.end(), '\n') == 3);
}

TEST_CASE("measure reads a derivation back")
{
    auto j = nlohmann::json::parse(run({"infer", "(\\x. x x)(\\y. y)", "--json"}).out);
    auto path = temp_file("deriv.json", j["derivation"].dump());
    auto m = run({"measure", "@" + path, "--json"});
    REQUIRE(m.code == 0);
    auto r = nlohmann::json::parse(m.out);
    CHECK(r["n"] == 2);
    CHECK(r["optimal"] == true);
    CHECK(r["d"] == 0);

    auto bad = j["derivation"];
    bad["conclusion"]["type"] = "'b";
    CHECK(run({"measure", bad.dump()}).code == 1);
}

TEST_CASE("corpus and test are reproducible")
{
    auto a = run({"corpus", "--seed", "5", "--count", "20"});
    auto b = run({"corpus", "--seed", "5", "--count", "20"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 21);
    CHECK(a.out != run({"corpus", "--seed", "6", "--count", "20"}).out);

    auto s = run({"corpus", "--seed", "5", "--count", "10", "--calculus", "ls", "--size", "10", "--json"});
    CHECK(nlohmann::json::parse(s.out)["terms"].size() == 10);

    auto t = run({"test", "--seed", "3", "--json", "--jobs", "2"});
    CHECK(t.code == 0);
    auto j = nlohmann::json::parse(t.out);
    CHECK(j["pass"] == true);
    CHECK(j["criteria"].size() == 9);
}
