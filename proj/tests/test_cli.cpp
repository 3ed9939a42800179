#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end tests of the installed binary; the path arrives via CFB_CLI_PATH.

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    if (const char* path = std::getenv("CFB_CLI_PATH")) return path;
#ifdef CFB_CLI_DEFAULT
    return CFB_CLI_DEFAULT;
#else
    FAIL("CFB_CLI_PATH is not set");
    return "";
#endif
}

int run(const std::string& args) {
    const std::string cmd = "\"" + cli_path() + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("") == 1);                       // missing subcommand
    CHECK(run("frobnicate") == 1);             // unknown subcommand
    CHECK(run("simulate --no-such-flag") == 1);
    CHECK(run("bounds") == 1);                 // missing --scores
    CHECK(run("estimate") == 1);               // missing --input
    CHECK(run("profit") == 1);                 // missing --report
}

TEST_CASE("data errors exit with code 2") {
    const fs::path dir = fresh_dir("cfb_cli_data_err");
    const fs::path bad = dir / "bad_scores.csv";
    std::ofstream(bad) << "id,s0_hat,s1_hat\n0,1.7,0.5\n";
    CHECK(run("bounds --scores " + bad.string() + " --out " + (dir / "out").string()) == 2);
    CHECK(run("bounds --scores " + (dir / "missing.csv").string() + " --out " +
              (dir / "out").string()) == 2);
}

TEST_CASE("simulate --runs 1 writes one data row plus prologue and header") {
    const fs::path dir = fresh_dir("cfb_cli_one_run");
    CHECK(run("simulate --runs 1 --seed 5 --out " + dir.string()) == 0);
    const std::string csv = slurp(dir / "benchmark_runs.csv");
    CHECK(count_lines(csv) == 3);  // "# ..." prologue, header, one record
    CHECK(csv.rfind("# cfbounds", 0) == 0);
    CHECK(fs::exists(dir / "summary.json"));
    const std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"seed\": 5") != std::string::npos);
}

TEST_CASE("simulate is byte-identical across reruns and thread counts") {
    const fs::path a = fresh_dir("cfb_cli_det_a");
    const fs::path b = fresh_dir("cfb_cli_det_b");
    const fs::path c = fresh_dir("cfb_cli_det_c");
    const std::string base = "simulate --runs 50 --seed 31 ";
    CHECK(run(base + "--threads 1 --out " + a.string()) == 0);
    CHECK(run(base + "--threads 1 --out " + b.string()) == 0);
    CHECK(run(base + "--threads 4 --out " + c.string()) == 0);
    for (const char* name : {"benchmark_runs.csv", "fig1_strata.csv", "fig2_phi_hist.csv"}) {
        const std::string ours = slurp(a / name);
        CHECK(ours == slurp(b / name));
        CHECK(ours == slurp(c / name));
    }
    const std::string summary = slurp(a / "summary.json");
    CHECK(summary == slurp(b / "summary.json"));
    CHECK(summary == slurp(c / "summary.json"));
}

TEST_CASE("bounds reproduces the report from a score file deterministically") {
    const fs::path dir = fresh_dir("cfb_cli_bounds");
    const fs::path scores = dir / "scores.csv";
    std::ofstream(scores) << "id,s0_hat,s1_hat\n"
                             "a,0.2,0.1\n"
                             "b,0.4,0.3\n"
                             "c,0.05,0.02\n";
    const std::string out1 = (dir / "o1").string();
    const std::string out2 = (dir / "o2").string();
    CHECK(run("bounds --scores " + scores.string() + " --table --seed 1 --out " + out1) == 0);
    CHECK(run("bounds --scores " + scores.string() + " --table --seed 1 --out " + out2) == 0);
    CHECK(slurp(out1 + "/report.json") == slurp(out2 + "/report.json"));
    CHECK(slurp(out1 + "/report_table.csv") == slurp(out2 + "/report_table.csv"));
    const std::string report = slurp(out1 + "/report.json");
    CHECK(report.find("uplift_bounds") != std::string::npos);
    CHECK(report.find("frechet_bounds") != std::string::npos);
    CHECK(report.find("\"n_samples\": 3") != std::string::npos);
}

TEST_CASE("estimate and profit run end to end") {
    const fs::path dir = fresh_dir("cfb_cli_estimate");
    const fs::path input = dir / "campaign.csv";
    {
        std::ofstream csv(input);
        csv << "x,t,y\n";
        // simple synthetic outcome with a mild treatment effect
        unsigned state = 12345;
        auto next01 = [&state]() {
            state = state * 1664525u + 1013904223u;
            return (state >> 8) / 16777216.0;
        };
        for (int i = 0; i < 2000; ++i) {
            const double x = next01();
            const int t = i % 3 == 0 ? 0 : 1;
            const double p = 0.05 + 0.1 * x - (t == 1 ? 0.02 * x : 0.0);
            csv << x << ',' << t << ',' << (next01() < p ? 1 : 0) << '\n';
        }
    }
    const std::string out = (dir / "out").string();
    CHECK(run("estimate --input " + input.string() + " --folds 5 --seed 9 --out " + out) == 0);
    CHECK(fs::exists(out + "/report.json"));
    CHECK(fs::exists(out + "/oof_scores.csv"));
    // oof scores: header + one row per input row
    CHECK(count_lines(slurp(out + "/oof_scores.csv")) == 2001);

    CHECK(run("profit --report " + out + "/report.json --value 120 --cost 1 --out " + out) ==
          0);
    const std::string profit = slurp(out + "/profit.json");
    CHECK(profit.find("persuadable_counts") != std::string::npos);
    CHECK(profit.find("realized_profit") != std::string::npos);
}

TEST_CASE("estimate is deterministic for a fixed seed") {
    const fs::path dir = fresh_dir("cfb_cli_estimate_det");
    const fs::path input = dir / "campaign.csv";
    {
        std::ofstream csv(input);
        csv << "x,t,y\n";
        for (int i = 0; i < 400; ++i) {
            csv << (i % 17) / 17.0 << ',' << i % 2 << ',' << (i % 11 == 0 ? 1 : 0) << '\n';
        }
    }
    const std::string out1 = (dir / "o1").string();
    const std::string out2 = (dir / "o2").string();
    const std::string args = "estimate --input " + input.string() + " --folds 3 --seed 77 ";
    CHECK(run(args + "--out " + out1) == 0);
    CHECK(run(args + "--out " + out2) == 0);
    CHECK(slurp(out1 + "/report.json") == slurp(out2 + "/report.json"));
    CHECK(slurp(out1 + "/oof_scores.csv") == slurp(out2 + "/oof_scores.csv"));
}

TEST_CASE("config file supplies defaults that flags override") {
    const fs::path dir = fresh_dir("cfb_cli_config");
    const fs::path config = dir / "config.json";
    std::ofstream(config) << "{\"runs\": 3, \"seed\": 21, \"out\": \"" << (dir / "from_config").string()
                          << "\"}\n";
    CHECK(run("simulate --config " + config.string()) == 0);
    CHECK(count_lines(slurp(dir / "from_config" / "benchmark_runs.csv")) == 5);

    // flag overrides config
    CHECK(run("simulate --config " + config.string() + " --runs 2 --out " +
              (dir / "flagged").string()) == 0);
    CHECK(count_lines(slurp(dir / "flagged" / "benchmark_runs.csv")) == 4);
    const std::string summary = slurp(dir / "flagged" / "summary.json");
    CHECK(summary.find("\"seed\": 21") != std::string::npos);
}
