#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "roid/evalio.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "roid_cli_tests";

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ROID_CLI_PATH) + " " + args + " >" +
                            (kWork / "stdout.txt").string() + " 2>" +
                            (kWork / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> csv_column(const fs::path& p, const std::string& name) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::string> out;
    int col = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream is(line);
        std::string f;
        while (std::getline(is, f, ',')) fields.push_back(f);
        if (col < 0) {
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] == name) col = static_cast<int>(i);
            REQUIRE(col >= 0);
            continue;
        }
        out.push_back(fields[static_cast<std::size_t>(col)]);
    }
    return out;
}

struct WorkDir {
    WorkDir() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
} const work_dir;

std::string path(const char* name) { return (kWork / name).string(); }

}  // namespace

TEST_CASE("generate writes the declared header") {
    REQUIRE(run_cli("generate --dims 40,40,40 --rank 3 --seed 7 --out " + path("t.dns")) == 0);
    std::ifstream in(path("t.dns"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "40 40 40");
}

TEST_CASE("mask, complete and evaluate round trip") {
    REQUIRE(run_cli("generate --dims 16,16,16 --rank 2 --seed 3 --out " + path("g.dns")) == 0);
    REQUIRE(run_cli("mask --in " + path("g.dns") + " --ratio 0.5 --seed 4 --out " +
                    path("obs.coo")) == 0);
    REQUIRE(run_cli("complete --method shooi --obs " + path("obs.coo") +
                    " --rank 2,2,2 --tol 1e-5 --out " + path("rec.dns") + " --report " +
                    path("rep.csv") + " --ref " + path("g.dns") + " --trace " +
                    path("trace.csv")) == 0);

    const auto rses = csv_column(path("rep.csv"), "rse");
    REQUIRE(rses.size() == 1);
    CHECK(std::stod(rses[0]) <= 1e-3);

    REQUIRE(run_cli("evaluate --x " + path("rec.dns") + " --ref " + path("g.dns")) == 0);
    const std::string out = read_file(kWork / "stdout.txt");
    CHECK(out.substr(0, 4) == "rse=");
    CHECK(std::stod(out.substr(4)) <= 1e-3);

    const std::string trace = read_file(kWork / "trace.csv");
    CHECK(trace.rfind("iter,r,s,rho,objective,rse", 0) == 0);
}

TEST_CASE("decompose via hooi and full") {
    REQUIRE(run_cli("generate --dims 14,14,14 --rank 2 --seed 5 --out " + path("f.dns")) == 0);
    REQUIRE(run_cli("decompose --method hooi --in " + path("f.dns") +
                    " --rank 2 --out " + path("h.dns") + " --report " + path("hrep.csv") +
                    " --ref " + path("f.dns")) == 0);
    CHECK(std::stod(csv_column(path("hrep.csv"), "rse")[0]) <= 1e-9);

    REQUIRE(run_cli("decompose --method full --in " + path("f.dns") +
                    " --rank 2 --lambda 1e6 --report " + path("frep.csv") + " --ref " +
                    path("f.dns")) == 0);
    CHECK(std::stod(csv_column(path("frep.csv"), "rse")[0]) <= 1e-3);
}

TEST_CASE("noise perturbs a tensor deterministically") {
    REQUIRE(run_cli("generate --dims 8,8,8 --rank 2 --seed 6 --out " + path("n0.dns")) == 0);
    REQUIRE(run_cli("noise --in " + path("n0.dns") + " --nf 0.1 --seed 9 --out " +
                    path("n1.dns")) == 0);
    REQUIRE(run_cli("noise --in " + path("n0.dns") + " --nf 0.1 --seed 9 --out " +
                    path("n2.dns")) == 0);
    CHECK(read_file(kWork / "n1.dns") == read_file(kWork / "n2.dns"));
    CHECK(read_file(kWork / "n1.dns") != read_file(kWork / "n0.dns"));
}

TEST_CASE("evaluate computes AUC from binary labels") {
    {
        std::ofstream x(path("x.dns"));
        x << "2 2 1\n0.9\n0.8\n0.2\n0.1\n";
        std::ofstream labels(path("lab.coo"));
        labels << "2 2 1\n1 1 1 1\n2 1 1 1\n1 2 1 0\n2 2 1 0\n";
        std::ofstream ref(path("ref.dns"));
        ref << "2 2 1\n1\n1\n0\n0\n";
    }
    REQUIRE(run_cli("evaluate --x " + path("x.dns") + " --ref " + path("ref.dns") +
                    " --labels " + path("lab.coo")) == 0);
    const std::string out = read_file(kWork / "stdout.txt");
    CHECK(out.find("auc=1") != std::string::npos);
}

TEST_CASE("bench sweeps the grid and is bitwise reproducible") {
    {
        std::ofstream spec(path("sweep.cfg"));
        spec << "dims = 10,10,10\nrank_true = 2\nmethod = roid shooi\nrank = 2 3\n"
                "ratio = 0.4\nlambda = 1e3\nreps = 2\nseed_base = 1\ntol = 1e-5\n"
                "maxiter = 300\n";
    }
    REQUIRE(run_cli("bench --spec " + path("sweep.cfg") + " --out " + path("r1.csv")) == 0);
    REQUIRE(run_cli("bench --spec " + path("sweep.cfg") + " --out " + path("r2.csv") +
                    " --jobs 2") == 0);

    const auto rse1 = csv_column(path("r1.csv"), "rse");
    const auto rse2 = csv_column(path("r2.csv"), "rse");
    CHECK(rse1.size() == 8);  // 2 methods x 2 ranks x 2 reps
    CHECK(rse1 == rse2);

    const auto methods = csv_column(path("r1.csv"), "method");
    CHECK(std::count(methods.begin(), methods.end(), "roid") == 4);
    CHECK(std::count(methods.begin(), methods.end(), "shooi") == 4);

    const std::string head = read_file(kWork / "r1.csv");
    CHECK(head.rfind("# config_hash=", 0) == 0);
}

TEST_CASE("groid accepts affinity files and honors ROID_JOBS") {
    REQUIRE(run_cli("generate --dims 8,8,6 --rank 2 --seed 11 --out " + path("gg.dns")) == 0);
    REQUIRE(run_cli("mask --in " + path("gg.dns") + " --ratio 0.6 --seed 11 --out " +
                    path("gg.coo")) == 0);
    {
        // Ring affinity over the mode-1 objects, stored as an 8x8x1 tensor.
        std::ofstream aff(path("aff1.dns"));
        aff << "8 8 1\n";
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i)
                aff << ((i == (j + 1) % 8 || j == (i + 1) % 8) ? 1 : 0) << "\n";
    }
    REQUIRE(run_cli("complete --method groid --obs " + path("gg.coo") +
                    " --rank 2 --mu 0.1 --affinity1 " + path("aff1.dns") + " --out " +
                    path("gg_rec.dns") + " --report " + path("gg_rep.csv") + " --ref " +
                    path("gg.dns")) == 0);
    CHECK(std::stod(csv_column(path("gg_rep.csv"), "rse")[0]) < 1.0);

    {
        std::ofstream spec(path("envjobs.cfg"));
        spec << "dims = 8,8,8\nrank_true = 2\nmethod = shooi\nrank = 2\nratio = 0.5\nreps = 2\n";
    }
    REQUIRE(std::system(("ROID_JOBS=2 " + std::string(ROID_CLI_PATH) + " bench --spec " +
                         path("envjobs.cfg") + " --out " + path("env.csv") + " >/dev/null 2>&1")
                            .c_str()) == 0);
    CHECK(csv_column(path("env.csv"), "rse").size() == 2);
}

TEST_CASE("bench records non-converged cells instead of aborting") {
    {
        std::ofstream spec(path("hard.cfg"));
        spec << "dims = 8,8,8\nrank_true = 2\nmethod = roid full hooi\nrank = 2\n"
                "ratio = 0.5\nlambda = 1e3\nreps = 1\nmaxiter = 1\ntol = 1e-14\n";
    }
    CHECK(run_cli("bench --spec " + path("hard.cfg") + " --out " + path("hard.csv")) == 0);
    const auto iters = csv_column(path("hard.csv"), "iters");
    REQUIRE(iters.size() == 3);  // roid and full capped at maxiter=1, hooi best-effort
    CHECK(iters[0] == "1");
    CHECK(iters[1] == "1");
    CHECK(run_cli("bench --spec " + path("hard.cfg") + " --out " + path("hard2.csv") +
                  " --strict") == 2);
}

TEST_CASE("usage and strict exit codes") {
    CHECK(run_cli("complete --no-such-flag") == 1);
    CHECK(run_cli("nonsense") == 1);
    CHECK(run_cli("complete --method roid --obs " + path("missing.coo") + " --rank 2") == 1);

    REQUIRE(run_cli("generate --dims 10,10,10 --rank 3 --seed 8 --out " + path("s.dns")) == 0);
    REQUIRE(run_cli("mask --in " + path("s.dns") + " --ratio 0.3 --seed 8 --out " +
                    path("s.coo")) == 0);
    CHECK(run_cli("complete --method roid --obs " + path("s.coo" ) +
                  " --rank 3 --maxiter 2 --tol 1e-12 --strict") == 2);
    CHECK(run_cli("complete --method roid --obs " + path("s.coo") +
                  " --rank 3 --maxiter 2 --tol 1e-12") == 0);
}
