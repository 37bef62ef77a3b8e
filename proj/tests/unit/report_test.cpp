#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qci/report.hpp"

using namespace qci;

namespace {

ComparisonReport sample() {
    ComparisonReport r;
    r.id = "sample";
    r.target = "pointwise_diag";
    r.lambdas = r.used_lambdas = {25, 50, 100, 200};
    r.sup_values = {1, 2, 4, 8};
    r.rows.push_back({25.0, "(1 2)", {3.5, 0.0}, {3.0, 0.25}, 0.559, 1e-12});
    r.fit.beta = 1.0;
    r.fit.points = 4;
    r.criterion = "beta <= 1.2";
    r.threshold = 1.2;
    r.pass = true;
    return r;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("data table has the documented header and full precision") {
    const auto t = report_table(sample());
    CHECK(t.rfind("lambda,point,actual_re,actual_im,predicted_re,predicted_im,remainder_abs,truncation_bound\n", 0) == 0);
    CHECK(t.find("25,(1 2),3.5,0,3,0.25,0.55900000000000005,9.9999999999999998e-13\n") != std::string::npos);
    CHECK(t.find('\r') == std::string::npos);
}

TEST_CASE("reports round-trip into summary rows") {
    const auto dir = std::filesystem::temp_directory_path() / "qci_report_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    const auto path = write_report(sample(), dir.string());
    CHECK(std::filesystem::exists(dir / "sample.csv"));
    const auto s = read_report_summary(path);
    CHECK(s.id == "sample");
    CHECK(s.pass);
    CHECK(s.beta == 1.0);
    const auto table = summary_table({s, s});
    CHECK(std::count(table.begin(), table.end(), '\n') == 3);
    // identical input, identical bytes
    const auto first = slurp((dir / "sample.csv").string());
    write_report(sample(), dir.string());
    CHECK(slurp((dir / "sample.csv").string()) == first);
}
