#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

// QUOPT_CLI_PATH and QUOPT_DATA_DIR come from the build.

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QUOPT_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult result;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string data_file(const char* name) { return std::string(QUOPT_DATA_DIR) + "/" + name; }

std::string write_temp_csv(const char* name, const std::string& body) {
    const std::string path = std::string("/tmp/") + name;
    std::ofstream out(path);
    out << body;
    return path;
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text) lines += c == '\n';
    return lines;
}

}  // namespace

TEST_CASE("cli calibrate: JSON shape on the bundled data") {
    const auto r = run_cli("calibrate --prices " + data_file("sample_cash_prices.csv") +
                           " --valuation-date 2014-06-18");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.contains("asset_ids"));
    REQUIRE(j.contains("vols"));
    REQUIRE(j.contains("corr"));
    CHECK(j["asset_ids"].size() == 3);
    CHECK(j["vols"].size() == 3);
    REQUIRE(j["corr"].size() == 3);
    CHECK(j["corr"][0].size() == 3);
    CHECK(j["corr"][0][0] == 1.0);
    for (const auto& v : j["vols"]) CHECK(v.get<double>() > 0.0);
}

TEST_CASE("cli calibrate: data errors exit 2") {
    SUBCASE("valuation date before the data") {
        const auto r = run_cli("calibrate --prices " + data_file("sample_cash_prices.csv") +
                               " --valuation-date 2014-05-02");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("constant-price asset") {
        const std::string path = write_temp_csv("quopt_const.csv",
                                                "date,asset_id,price\n"
                                                "2014-05-01,FLAT,100\n"
                                                "2014-05-02,FLAT,100\n"
                                                "2014-05-03,FLAT,100\n"
                                                "2014-05-01,MOVES,100\n"
                                                "2014-05-02,MOVES,101\n"
                                                "2014-05-03,MOVES,99\n");
        const auto r = run_cli("calibrate --prices " + path + " --valuation-date 2014-05-04");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("malformed file") {
        const std::string path = write_temp_csv("quopt_bad.csv", "date,asset_id,price\nxxx\n");
        const auto r = run_cli("calibrate --prices " + path + " --valuation-date 2014-05-04");
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("cli price: explicit two-asset benchmark parameters") {
    const auto r = run_cli("price --spot 40,40 --vol 0.25,0.25 --corr \"1,0.95;0.95,1\""
                           " --tau 0.7487553464510693 --rate 0.10 --paths 100000 --seed 9");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const double value = j["value"].get<double>();
    const double se = j["std_error"].get<double>();
    // Closed-form exchange option at these parameters: 1.176287
    CHECK(std::abs(value - 1.176287) <= 4.0 * se);
    CHECK(j["n_paths"].get<long long>() == 100000);
    const double two_step = j["two_step_value"].get<double>();
    CHECK(std::abs(value - two_step) <= 1e-9 * value);
}

TEST_CASE("cli price: identical seeds give byte-identical output across thread counts") {
    const std::string base = "price --spot 40,40,40 --vol 0.25,0.25,0.2"
                             " --corr \"1,0.9,0.8;0.9,1,0.85;0.8,0.85,1\""
                             " --tau 0.5 --rate 0.07 --paths 20000 --seed 7";
    const auto a = run_cli(base);
    const auto b = run_cli(base);
    const auto c = run_cli(base + " --threads 1");
    const auto d = run_cli(base + " --threads 2");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(a.out == d.out);
}

TEST_CASE("cli price: non-PSD correlation exits 3, --repair-corr recovers") {
    const std::string corr = " --corr \"1,-0.9,-0.9;-0.9,1,-0.9;-0.9,-0.9,1\"";
    const std::string base = "price --spot 100,100,100 --vol 0.2,0.2,0.2" + corr +
                             " --tau 0.5 --rate 0.05 --paths 2000 --seed 3";
    CHECK(run_cli(base).exit_code == 3);
    const auto repaired = run_cli(base + " --repair-corr");
    CHECK(repaired.exit_code == 0);
    const auto j = nlohmann::json::parse(repaired.out);
    CHECK(j["value"].get<double>() >= 0.0);
}

TEST_CASE("cli price: basket and input errors exit 2") {
    CHECK(run_cli("price --spot 40,40 --vol 0.25,0.25 --corr \"1,0.5;0.5,1\" --tau 0.5"
                  " --rate 0.1 --par MISSING --paths 1000").exit_code == 2);
    CHECK(run_cli("price --spot 40 --vol 0.25 --corr 1 --tau 0.5 --rate 0.1 --paths 1000")
              .exit_code == 2);  // single asset is not a basket
    CHECK(run_cli("price --rate 0.1").exit_code == 2);
    CHECK(run_cli("price --prices " + data_file("sample_cash_prices.csv") +
                  " --valuation-date 2014-07-02 --expiry 2014-06-01 --rate 0.075")
              .exit_code == 2);  // expiry before valuation
}

TEST_CASE("cli price: file mode calibrates inline and reports the ratio") {
    const auto r = run_cli("price --prices " + data_file("sample_cash_prices.csv") +
                           " --valuation-date 2014-07-02 --expiry 2014-08-20 --rate 0.075"
                           " --par DELHI --alt BIKANER:70 --alt INDORE:19"
                           " --market-futures 2937 --paths 20000 --seed 5");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["value"].get<double>() >= 0.0);
    REQUIRE(j.contains("ratio_pct"));
    CHECK(j["ratio_pct"].get<double>() ==
          doctest::Approx(100.0 * j["value"].get<double>() / 2937.0).epsilon(1e-12));
}

TEST_CASE("cli price: csv output mode") {
    const auto r = run_cli("price --spot 40,40 --vol 0.2,0.2 --corr \"1,0.9;0.9,1\" --tau 0.5"
                           " --rate 0.1 --paths 2000 --seed 1 --output csv --market-futures 43");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("value,std_error,f_wo,f_w_estimate,two_step_value,n_paths,seed,ratio_pct\n",
                      0) == 0);
    CHECK(count_lines(r.out) == 2);
}

TEST_CASE("cli boyle: tiny path budget still emits the full CSV but fails the self-check") {
    const auto r = run_cli("boyle --paths 200 --seed 4");
    CHECK(r.exit_code != 0);
    CHECK(count_lines(r.out) == 19);  // header + 18 cells
    CHECK(r.out.rfind("n,rho,mc_value,reference_value,relative_error_pct\n", 0) == 0);
}

TEST_CASE("cli boyle: fixed seed reproduces the CSV byte for byte") {
    const auto a = run_cli("boyle --paths 2000 --seed 12");
    const auto b = run_cli("boyle --paths 2000 --seed 12");
    const auto c = run_cli("boyle --paths 2000 --seed 12 --threads 2");
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
}

TEST_CASE("cli batch: table shape, error rows, discount direction") {
    const std::string common = "batch --prices " + data_file("sample_cash_prices.csv") +
                               " --futures " + data_file("sample_futures_prices.csv") +
                               " --expiry 2014-08-20 --rate 0.075 --par DELHI"
                               " --dates 2014-04-01,2014-06-18,2014-06-25,2014-07-02"
                               " --paths 4000 --seed 99";
    const auto discounted = run_cli(common + " --alt BIKANER:70 --alt INDORE:19");
    REQUIRE(discounted.exit_code == 0);
    CHECK(discounted.out.rfind("date,futures_price,option_value,option_pct_of_futures,error\n",
                               0) == 0);
    REQUIRE(count_lines(discounted.out) == 5);

    // First requested date precedes the data: error row with empty values
    CHECK(discounted.out.find("2014-04-01,,,,") != std::string::npos);

    const auto zero = run_cli(common);
    REQUIRE(zero.exit_code == 0);

    // Parse value column per data row and compare runs on the same seed
    auto values = [](const std::string& csv) {
        std::vector<double> out;
        std::size_t pos = csv.find('\n') + 1;
        while (pos < csv.size()) {
            const std::size_t end = csv.find('\n', pos);
            const std::string line = csv.substr(pos, end - pos);
            std::size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
            std::size_t c3 = line.find(',', c2 + 1);
            const std::string field = line.substr(c2 + 1, c3 - c2 - 1);
            if (!field.empty()) out.push_back(std::stod(field));
            pos = end + 1;
        }
        return out;
    };
    const auto dv = values(discounted.out);
    const auto zv = values(zero.out);
    REQUIRE(dv.size() == 3);
    REQUIRE(zv.size() == 3);
    for (std::size_t i = 0; i < dv.size(); ++i) {
        CHECK(dv[i] >= 0.0);
        CHECK(dv[i] <= zv[i]);  // discounts can only lower the option value
    }
}

TEST_CASE("cli batch: byte-identical reruns for a fixed seed") {
    const std::string cmd = "batch --prices " + data_file("sample_cash_prices.csv") +
                            " --futures " + data_file("sample_futures_prices.csv") +
                            " --expiry 2014-08-20 --rate 0.075 --par DELHI --alt BIKANER:70"
                            " --dates 2014-06-25,2014-07-09 --paths 4000 --seed 321";
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd + " --threads 2");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli batch: all-failing date list exits 2") {
    const auto r = run_cli("batch --prices " + data_file("sample_cash_prices.csv") +
                           " --futures " + data_file("sample_futures_prices.csv") +
                           " --expiry 2014-08-20 --rate 0.075 --dates 2013-01-01"
                           " --paths 2000");
    CHECK(r.exit_code == 2);
    CHECK(count_lines(r.out) == 2);  // header + error row
}
