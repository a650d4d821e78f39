#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dcrm/dataset_io.hpp"
#include "dcrm/metrics_io.hpp"

using namespace dcrm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result run(const std::string& args) {
  const std::string cmd = std::string(DCRM_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "dcrm_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

const std::string kTiny = " --depth 2 --base-channels 2 --dropout-blocks 1 --dropout 0 ";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("gen-data writes the requested splits reproducibly") {
    Result r = run("gen-data --case 1 --dof 9 --seed 7 --labels on --out " + path("c1"));
    REQUIRE(r.code == 0);
    const Dataset c1 = read_dataset(path("c1") + "/train.bin");
    CHECK(c1.size() == 1);
    CHECK(c1.outputs.has_value());
    REQUIRE(run("gen-data --case 1 --dof 9 --seed 7 --labels on --out " + path("c1b")).code == 0);
    CHECK(slurp(path("c1") + "/train.bin") == slurp(path("c1b") + "/train.bin"));
    CHECK(slurp(path("c1") + "/test.bin") == slurp(path("c1b") + "/test.bin"));

    REQUIRE(run("gen-data --case 2 --dof 9 --train 20 --test 100 --seed 1 --labels off --out " + path("c2")).code == 0);
    CHECK(read_dataset(path("c2") + "/train.bin").size() == 20);
    CHECK(read_dataset(path("c2") + "/test.bin").size() == 100);
    CHECK_FALSE(read_dataset(path("c2") + "/test.bin").outputs.has_value());
    CHECK(fs::exists(path("c2") + "/manifest.txt"));
  }

  TEST_CASE("gen-data rejects invalid flags") {
    CHECK(run("gen-data --case 4 --out " + path("bad")).code == 2);
    CHECK(run("gen-data --case 1 --train 3 --out " + path("bad")).code == 2);
    CHECK(run("gen-data --case 2 --labels maybe --out " + path("bad")).code == 2);
    CHECK(run("gen-data --case 2 --dof 2 --out " + path("bad")).code == 2);
  }

  TEST_CASE("train, eval and curves") {
    REQUIRE(run("gen-data --case 2 --dof 9 --train 4 --test 6 --seed 3 --labels on --out " + path("d")).code == 0);
    Result t = run("train --method dcrm --data " + path("d") + " --epochs 12 --eval-every 5 --seed 1 --out " +
                   path("run_dcrm") + kTiny);
    REQUIRE(t.code == 0);
    const RunMetrics m = read_metrics_csv(path("run_dcrm") + "/metrics.csv");
    REQUIRE(m.rows.size() == 4);  // epochs 0, 5, 10, 12
    CHECK(m.rows.back().epoch == 12);
    CHECK(fs::exists(path("run_dcrm") + "/model.ckpt"));
    CHECK(t.output.find("test_err=" + format_double(m.rows.back().test_err)) != std::string::npos);

    Result e = run("eval --ckpt " + path("run_dcrm") + "/model.ckpt --data " + path("d") + " --out " + path("eval.csv"));
    REQUIRE(e.code == 0);
    CHECK(e.output.find("test_err=" + format_double(m.rows.back().test_err)) != std::string::npos);
    Result etrain = run("eval --ckpt " + path("run_dcrm") + "/model.ckpt --data " + path("d") + " --split train --out " +
                        path("eval_train.csv"));
    REQUIRE(etrain.code == 0);
    const double train_err = std::stod(etrain.output.substr(etrain.output.find('=') + 1));
    CHECK(std::abs(train_err - m.rows.back().train_err) <= 1e-12);
    std::ifstream per(path("eval.csv"));
    std::string line;
    std::getline(per, line);
    CHECK(line == "sample,e_abs_normalized");
    std::size_t rows = 0;
    while (std::getline(per, line)) ++rows;
    CHECK(rows == 6);

    REQUIRE(run("train --method cpinn --data " + path("d") + " --epochs 3 --eval-every 5 --out " + path("run_cpinn") + kTiny).code == 0);
    REQUIRE(run("train --method cnn --data " + path("d") + " --epochs 3 --eval-every 5 --out " + path("run_cnn") + kTiny).code == 0);
    Result c = run("curves --runs " + path("run_dcrm") + "/metrics.csv " + path("run_cpinn") + "/metrics.csv " +
                   path("run_cnn") + "/metrics.csv --out " + path("curves.csv"));
    REQUIRE(c.code == 0);
    const std::string curves = slurp(path("curves.csv"));
    CHECK(curves.rfind("method,epoch,split,value\n", 0) == 0);
    for (const char* label : {"\ndcrm,", "\ncpinn,", "\ncnn,"}) CHECK(curves.find(label) != std::string::npos);
  }

  TEST_CASE("a rerun from the manifest reproduces the metrics") {
    REQUIRE(run("gen-data --case 2 --dof 9 --train 4 --test 2 --seed 5 --labels off --out " + path("m")).code == 0);
    REQUIRE(run("train --method dcrm --data " + path("m") + " --epochs 6 --eval-every 2 --seed 9 --timing off --dropout 0.5 --out " +
                path("first") + " --depth 2 --base-channels 2 --dropout-blocks 1").code == 0);
    REQUIRE(run("train --manifest " + path("first") + "/manifest.txt --out " + path("second")).code == 0);
    CHECK(slurp(path("first") + "/metrics.csv") == slurp(path("second") + "/metrics.csv"));
  }

  TEST_CASE("training errors map to exit codes") {
    REQUIRE(run("gen-data --case 2 --dof 9 --train 2 --test 2 --labels off --out " + path("u")).code == 0);
    Result r = run("train --method cnn --data " + path("u") + " --epochs 1 --out " + path("x") + kTiny);
    CHECK(r.code == 2);
    CHECK(r.output.find("labels required") != std::string::npos);
    CHECK(run("train --method fem --data " + path("u") + " --out " + path("x")).code == 2);
    REQUIRE(run("gen-data --case 2 --dof 8 --train 2 --test 2 --labels off --out " + path("even")).code == 0);
    CHECK(run("train --method dcrm --quadrature simpson --data " + path("even") + " --epochs 1 --out " + path("x") + kTiny).code == 2);
    CHECK(run("train --method cpinn --lr 1e200 --data " + path("u") + " --epochs 50 --out " + path("div") + kTiny).code == 3);
    CHECK(run("train --method dcrm --data " + path("nowhere") + " --out " + path("x")).code == 4);
  }

  TEST_CASE("eval rejects a checkpoint of another resolution") {
    REQUIRE(run("gen-data --case 2 --dof 9 --train 2 --test 2 --labels off --out " + path("e9")).code == 0);
    REQUIRE(run("gen-data --case 2 --dof 11 --train 2 --test 2 --labels off --out " + path("e11")).code == 0);
    REQUIRE(run("train --method dcrm --data " + path("e9") + " --epochs 1 --out " + path("r9") + kTiny).code == 0);
    Result r = run("eval --ckpt " + path("r9") + "/model.ckpt --data " + path("e11"));
    CHECK(r.code == 2);
    CHECK(r.output.find("does not match") != std::string::npos);
    CHECK(run("eval --ckpt " + path("e9") + "/train.bin --data " + path("e9")).code == 4);
  }
}
