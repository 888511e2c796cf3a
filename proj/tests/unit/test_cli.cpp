// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "vmhan/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = vmhan::cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"train"}).code == 2);
  CHECK(run({"gradcheck", "--d", "eight"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("gradcheck") != std::string::npos);
}

TEST_CASE("cli: gradcheck reports and passes") {
  const auto r = run({"gradcheck", "--d", "8", "--k", "3", "--seed", "1",
                      "--step", "1e-5", "--tol", "1e-4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("max rel err") != std::string::npos);
  const auto strict = run({"gradcheck", "--tol", "1e-30"});
  CHECK(strict.code == 1);
  CHECK(strict.out.find("FAIL") != std::string::npos);
}

TEST_CASE("cli: synth, train, eval, predict and inspect end to end") {
  fixtures::TempDir dir("cli");
  const std::string root = dir.path().string();
  auto r = run({"synth", "--out", root, "--n", "30", "--k", "3", "--relations", "3",
                "--text-dim", "10", "--visual-dim", "14", "--seed", "5",
                "--split", "20", "5", "5"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir.path() / "manifest.part2.jsonl"));

  std::ofstream(dir.path() / "exp.cfg") << "d=8\ntext_dim=10\nvisual_dim=14\nepochs=2\n";
  const std::string train_m = root + "/manifest.part0.jsonl";
  const std::string val_m = root + "/manifest.part1.jsonl";
  const std::string test_m = root + "/manifest.part2.jsonl";
  const std::string vocab = root + "/relations.txt";
  r = run({"train", "--manifest", train_m, "--val", val_m, "--vocab", vocab, "--config",
           root + "/exp.cfg", "--out", root + "/m.vmhs", "--log", root + "/log.jsonl"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  std::istringstream log(slurp(dir.path() / "log.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(log, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("loss_kl"));
    CHECK(j.contains("val_f1"));
    ++lines;
  }
  CHECK(lines == 2);

  r = run({"eval", "--manifest", test_m, "--model", root + "/m.vmhs"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("accuracy=", 0) == 0);
  CHECK(r.out.find("n=5") != std::string::npos);

  r = run({"predict", "--manifest", test_m, "--model", root + "/m.vmhs", "--out",
           root + "/pred.jsonl"});
  REQUIRE(r.code == 0);
  std::istringstream preds(slurp(dir.path() / "pred.jsonl"));
  std::getline(preds, line);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["id"] == "syn000025");
  CHECK(j["probability"].get<double>() > 0.0);

  r = run({"inspect", "--manifest", root + "/manifest.jsonl", "--id", "syn000003"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("nodes 6") != std::string::npos);
  CHECK(r.out.find("edges 5") != std::string::npos);
  CHECK(r.out.find("column sums 6 2 4 5 5") != std::string::npos);
  CHECK(r.out.find("incidences 22") != std::string::npos);
  r = run({"inspect", "--manifest", root + "/manifest.jsonl", "--id", "syn000003",
           "--no-inter-modal", "--k", "0"});
  CHECK(r.out.find("edges 3") != std::string::npos);

  r = run({"inspect", "--manifest", root + "/manifest.jsonl", "--id", "nope"});
  CHECK(r.code == 1);
  r = run({"eval", "--manifest", test_m, "--model", root + "/missing.vmhs"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") == 0);
}

TEST_CASE("cli: grid search needs a validation set and prints trials") {
  fixtures::TempDir dir("cli_grid");
  const std::string root = dir.path().string();
  REQUIRE(run({"synth", "--out", root, "--n", "12", "--relations", "2", "--text-dim",
               "6", "--visual-dim", "6", "--split", "8", "4"})
              .code == 0);
  std::ofstream(dir.path() / "g.cfg")
      << "d=4\ntext_dim=6\nvisual_dim=6\nepochs=1\ngrid.lambda_kl=0,0.01,1\n";
  const std::vector<std::string> base{"train", "--manifest", root + "/manifest.part0.jsonl",
                                      "--config", root + "/g.cfg", "--out", root + "/m.vmhs"};
  auto r = run(base);
  CHECK(r.code == 1);
  CHECK(r.err.find("--val") != std::string::npos);
  auto with_val = base;
  with_val.push_back("--val");
  with_val.push_back(root + "/manifest.part1.jsonl");
  r = run(with_val);
  CHECK(r.code == 0);
  std::size_t trials = 0;
  for (std::size_t at = r.out.find("grid "); at != std::string::npos;
       at = r.out.find("grid ", at + 1)) {
    ++trials;
  }
  CHECK(trials == 3);
}
