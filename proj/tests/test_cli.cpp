#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("gkp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& stdout_file = "/dev/null", const std::string& env = "") {
  std::string cmd = env + " " + std::string(GKP_LAB_BIN) + " " + args + " > " + stdout_file + " 2> /dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string header_value(const std::string& csv, const std::string& key) {
  auto pos = csv.find("# " + key + ": ");
  REQUIRE(pos != std::string::npos);
  pos += key.size() + 4;
  return csv.substr(pos, csv.find('\n', pos) - pos);
}

}  // namespace

TEST_CASE("lattice-info reports the tesseract distances") {
  fs::path out = scratch() / "tess.csv";
  REQUIRE(run("lattice-info --name tesseract", out.string()) == 0);
  std::string csv = slurp(out);
  CHECK(csv.find("lattice,n_modes,d,dist_x,dist_y,dist_z,gram\n") != std::string::npos);
  CHECK(csv.find("tesseract,2,2,0.8408964153,1.189207115,0.8408964153,\"[[") != std::string::npos);
  REQUIRE(run("lattice info tesseract", (scratch() / "tess2.csv").string()) == 0);
  CHECK(slurp(scratch() / "tess2.csv") == csv);
}

TEST_CASE("header records version, hash, seed, and units") {
  fs::path out = scratch() / "hdr.csv";
  REQUIRE(run("qubit-mc --lattice hex --sigma 0.3 --trials 2000 --seed 9 --out " + out.string()) == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("# gkp-lab ", 0) == 0);
  CHECK(header_value(csv, "experiment") == "qubit-mc");
  CHECK(header_value(csv, "seed") == "9");
  CHECK(header_value(csv, "config_hash").size() == 16);
  CHECK(!header_value(csv, "units").empty());
  CHECK(csv.find("lattice,sigma,trials,p_x,p_y,p_z,p_e,se_x,se_y,se_z\n") != std::string::npos);
}

TEST_CASE("malformed or unknown config keys exit 2 without output") {
  fs::path out = scratch() / "never.csv";
  put(scratch() / "mal.json", "{\"experiment\": \"qubit-mc\", ");
  CHECK(run("--config " + (scratch() / "mal.json").string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
  put(scratch() / "key.json", R"({"experiment": "qubit-mc", "params": {}, "colour": 1})");
  CHECK(run("--config " + (scratch() / "key.json").string() + " --out " + out.string()) == 2);
  put(scratch() / "param.json", R"({"experiment": "qubit-mc", "params": {"sigmaa": 0.1}})");
  CHECK(run("--config " + (scratch() / "param.json").string() + " --out " + out.string()) == 2);
  put(scratch() / "type.json", R"({"experiment": "qubit-mc", "params": {"sigma": "big"}})");
  CHECK(run("--config " + (scratch() / "type.json").string() + " --out " + out.string()) == 2);
  put(scratch() / "exp.json", R"({"experiment": "qubit-nc"})");
  CHECK(run("--config " + (scratch() / "exp.json").string() + " --out " + out.string()) == 2);
  CHECK(run("qubit-mc --sigma abc --out " + out.string()) == 2);
  CHECK(run("qubit-mc --threads zero --out " + out.string()) == 2);
  CHECK(run("qubit-mc --gnuplot") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("numerical failures exit 3") {
  fs::path out = scratch() / "fail.csv";
  CHECK(run("fock-spectrum --dim 100 --out " + out.string()) == 3);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("Monte Carlo output is byte-identical across thread counts") {
  const std::string qmc = "qubit-mc --lattice tesseract --sigma 0.3 --trials 300000 --seed 21";
  REQUIRE(run(qmc + " --threads 1 --out " + (scratch() / "q1.csv").string()) == 0);
  REQUIRE(run(qmc + " --threads 4 --out " + (scratch() / "q4.csv").string()) == 0);
  CHECK(slurp(scratch() / "q1.csv") == slurp(scratch() / "q4.csv"));

  const std::string o2o = "o2o --ancilla hex --sigma 0.2 --trials 20000 --seed 3 --optimize-gain";
  REQUIRE(run(o2o + " --threads 1 --out " + (scratch() / "o1.csv").string()) == 0);
  REQUIRE(run(o2o + " --out " + (scratch() / "o3.csv").string(), "/dev/null", "GKPLAB_THREADS=3") == 0);
  CHECK(slurp(scratch() / "o1.csv") == slurp(scratch() / "o3.csv"));
}

TEST_CASE("normalized config round-trips") {
  fs::path dumped = scratch() / "dumped.json";
  REQUIRE(run("o2o --ancilla square --sigma 0.15 --gain 3 --trials 5000 --seed 17 --dump-config", dumped.string()) == 0);
  REQUIRE(run("--config " + dumped.string() + " --out " + (scratch() / "from_config.csv").string()) == 0);
  REQUIRE(run("o2o --ancilla square --sigma 0.15 --gain 3 --trials 5000 --seed 17 --out " +
              (scratch() / "from_flags.csv").string()) == 0);
  CHECK(slurp(scratch() / "from_config.csv") == slurp(scratch() / "from_flags.csv"));

  fs::path again = scratch() / "again.json";
  REQUIRE(run("--config " + dumped.string() + " --dump-config", again.string()) == 0);
  CHECK(slurp(again) == slurp(dumped));

  put(scratch() / "a.json", R"({"seed": 5, "experiment": "capacity", "params": {"eta": 0.7, "channel": "loss"}})");
  put(scratch() / "b.json", R"({"params": {"channel": "loss", "eta": 0.7}, "experiment": "capacity", "seed": 5})");
  REQUIRE(run("--config " + (scratch() / "a.json").string(), (scratch() / "a.csv").string()) == 0);
  REQUIRE(run("--config " + (scratch() / "b.json").string(), (scratch() / "b.csv").string()) == 0);
  CHECK(slurp(scratch() / "a.csv") == slurp(scratch() / "b.csv"));
}

TEST_CASE("config hash tracks seed and parameters but not threads or output") {
  auto hash = [](const std::string& args) {
    fs::path out = scratch() / "h.csv";
    REQUIRE(run(args + " --out " + out.string()) == 0);
    return header_value(slurp(out), "config_hash");
  };
  const std::string base = "capacity --channel loss --eta 0.8";
  std::string h = hash(base + " --seed 1");
  CHECK(hash(base + " --seed 1 --threads 2") == h);
  CHECK(hash(base + " --seed 2") != h);
  CHECK(hash("capacity --channel loss --eta 0.81 --seed 1") != h);
}

TEST_CASE("reproduce writes a CSV bundle with gnuplot scripts") {
  fs::path dir = scratch() / "bundle";
  REQUIRE(run("reproduce fig21a --points 5 --gnuplot --out " + dir.string()) == 0);
  fs::path csv = dir / "fig21a_pe.csv";
  REQUIRE(fs::exists(csv));
  CHECK(fs::exists(dir / "fig21a_pe.csv.gp"));
  std::string text = slurp(csv);
  CHECK(text.find("kappa_dt,sigma2,pe_square,pe_hex,pe_tesseract,pe_d4\n") != std::string::npos);
  std::size_t rows = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) rows += !line.empty() && line[0] != '#';
  CHECK(rows == 6);
}
