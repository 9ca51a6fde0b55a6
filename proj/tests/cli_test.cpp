#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("modsynth_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    write("golden.jsonl", "{\"x\": 4}\n{\"x\": 4}\n{\"x\": 1}\n{\"x\": 0}\n{\"x\": 2}\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string spec(const std::string& name) { return std::string(MODSYNTH_SPECS_DIR) + "/" + name + ".spec"; }

  void write(const std::string& name, const std::string& content) const { std::ofstream(dir_ / name) << content; }
  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int run(const std::string& args) {
    std::string cmd = std::string(MODSYNTH_CLI) + " " + args + " > " + path("stdout") + " 2> " + path("stderr");
    int status = std::system(cmd.c_str());
    out = read("stdout");
    err = read("stderr");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  void pipeline(const std::string& theory = "") {
    std::string t = theory.empty() ? "" : " --theory " + theory;
    ASSERT_EQ(run("abstract " + spec("running") + t + " -o " + path("a.json")), 0) << err;
    ASSERT_EQ(run("synth " + path("a.json") + " -o " + path("m.json")), 0) << err;
    ASSERT_EQ(run("skolem " + path("a.json") + " " + path("m.json") + " -o " + path("p.json")), 0) << err;
  }

  fs::path dir_;
  std::string out, err;
};

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, PipelineClosure) {
  pipeline();
  ASSERT_EQ(run("emit-c " + path("a.json") + " " + path("p.json") + " -o " + path("p.c")), 0) << err;
  EXPECT_NE(read("p.c").find("#include <stdint.h>"), std::string::npos);
  ASSERT_EQ(run("run " + path("a.json") + " " + path("m.json") + " " + path("golden.jsonl") + " --provider-file " +
                path("p.json") + " -o " + path("r.jsonl")),
            0)
      << err;
  EXPECT_NE(err.find("5 steps, 0 violations"), std::string::npos) << err;
  auto records = read("r.jsonl");
  EXPECT_EQ(lines(records), 5u);
  std::istringstream in(records);
  std::string line;
  while (std::getline(in, line)) EXPECT_NE(line.find("\"y\":2"), std::string::npos) << line;
  ASSERT_EQ(run("check " + spec("running") + " " + path("r.jsonl")), 0) << out << err;
  EXPECT_NE(out.find("0 violations"), std::string::npos);
}

TEST_F(Cli, ImportRoundTrip) {
  pipeline();
  ASSERT_EQ(run("synth " + path("a.json") + " --import " + path("m.json") + " -o " + path("m2.json")), 0) << err;
  EXPECT_EQ(read("m.json"), read("m2.json"));
}

TEST_F(Cli, RealTheory) {
  pipeline("real");
  write("half.jsonl", "{\"x\": \"3/2\"}\n{\"x\": 5}\n{\"x\": \"-1/3\"}\n");
  ASSERT_EQ(run("run " + path("a.json") + " " + path("m.json") + " " + path("half.jsonl") + " -o " + path("r.jsonl")), 0)
      << err;
  EXPECT_EQ(run("check " + spec("running") + " --theory real " + path("r.jsonl")), 0) << out;
  EXPECT_EQ(run("emit-c " + path("a.json") + " " + path("p.json")), 1);
  EXPECT_NE(err.find("error [provider]"), std::string::npos) << err;
}

TEST_F(Cli, Unrealizable) {
  ASSERT_EQ(run("abstract " + spec("unrealizable") + " -o " + path("u.json")), 0) << err;
  EXPECT_EQ(run("synth " + path("u.json")), 1);
  EXPECT_NE(err.find("unrealizable"), std::string::npos) << err;
  EXPECT_NE(err.find("e_0"), std::string::npos) << err;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("abstract"), 2);
  EXPECT_EQ(run("abstract " + spec("running") + " --theory bool"), 2);
  EXPECT_EQ(run("abstract " + path("missing.spec")), 2);
  EXPECT_EQ(run("--help"), 0);
  pipeline();
  EXPECT_EQ(run("run " + path("a.json") + " " + path("m.json") + " " + path("golden.jsonl") + " --provider adaptive"), 2);
}

TEST_F(Cli, DomainErrors) {
  write("bad.spec", "env x:int; sys y:int; property: G(y > q)");
  EXPECT_EQ(run("abstract " + path("bad.spec")), 1);
  EXPECT_NE(err.find("error [parser]"), std::string::npos) << err;
  pipeline();
  write("bad.jsonl", "{\"x\": 4}\n{\"y\": 4}\n");
  EXPECT_EQ(run("run " + path("a.json") + " " + path("m.json") + " " + path("bad.jsonl")), 1);
  write("bounded.json", R"({"constraints":[{"letter":"e_2","choice":"011","formula":"y < 0"}]})");
  EXPECT_EQ(run("skolem " + path("a.json") + " " + path("m.json") + " --gamma " + path("bounded.json")), 1);
  EXPECT_NE(err.find("error [provider]"), std::string::npos) << err;
}

TEST_F(Cli, ForgedTraceFailsCheck) {
  write("forged.jsonl", "{\"x\":4,\"y\":0,\"choice\":\"011\"}\n{\"x\":1,\"y\":2,\"choice\":\"110\"}\n");
  EXPECT_EQ(run("check " + spec("running") + " " + path("forged.jsonl")), 1);
  EXPECT_NE(out.find("[literal]"), std::string::npos) << out;
}

TEST_F(Cli, Adaptive) {
  pipeline();
  write("g.json", R"({"constraints":[{"letter":"e_2","choice":"011","shape":"greatest","output":"y"}]})");
  ASSERT_EQ(run("skolem " + path("a.json") + " " + path("m.json") + " --gamma " + path("g.json") + " -o " +
                path("pg.json")),
            0)
      << err;
  ASSERT_EQ(run("run " + path("a.json") + " " + path("m.json") + " " + path("golden.jsonl") + " --provider-file " +
                path("pg.json")),
            0)
      << err;
  std::vector<std::string> ys;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) ys.push_back(line.substr(line.find("\"y\":"), 5));
  EXPECT_EQ(ys, (std::vector<std::string>{"\"y\":4", "\"y\":4", "\"y\":2", "\"y\":2", "\"y\":2"}));
  ASSERT_EQ(run("run " + path("a.json") + " " + path("m.json") + " " + path("golden.jsonl") +
                " --provider adaptive --gamma " + path("g.json")),
            0)
      << err;
}

TEST_F(Cli, Bench) {
  pipeline();
  ASSERT_EQ(run("bench " + path("a.json") + " " + path("m.json") + " " + path("golden.jsonl") +
                " --repeats 4 --seed 11 --csv " + path("b.csv")),
            0)
      << err;
  EXPECT_NE(out.find("provider=static"), std::string::npos) << out;
  EXPECT_NE(out.find("provider=dynamic"), std::string::npos) << out;
  EXPECT_NE(out.find("divergence=0% vs static"), std::string::npos) << out;
  auto csv = read("b.csv");
  EXPECT_EQ(lines(csv), 1u + 2u * 5u * 4u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,component,micros,provider_kind,seed,diverged");
  EXPECT_EQ(run("bench " + path("a.json") + " " + path("m.json") + " " + path("golden.jsonl") + " --repeats 0"), 2);
}
