#include "qci/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qci/error.hpp"

namespace qci {
namespace {

using nlohmann::ordered_json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// NaN and infinities are not JSON numbers
ordered_json jnum(double v) {
    if (std::isfinite(v)) return v;
    return num(v);
}

}  // namespace

std::string report_document(const ComparisonReport& r) {
    ordered_json j;
    j["format"] = "qci-report";
    j["version"] = 1;
    j["id"] = r.id;
    j["target"] = r.target;
    j["system"] = r.system;
    j["cutoff"] = r.cutoff;
    j["region"] = r.region;
    j["lambdas"] = r.lambdas;
    j["used_lambdas"] = r.used_lambdas;
    ordered_json sup = ordered_json::array();
    for (double v : r.sup_values) sup.push_back(jnum(v));
    j["fitted_values"] = sup;
    j["fit"] = {{"beta", jnum(r.fit.beta)},
                {"log_c", jnum(r.fit.log_c)},
                {"std_error", jnum(r.fit.std_error)},
                {"ci95", {jnum(r.fit.ci_lo), jnum(r.fit.ci_hi)}},
                {"points", r.fit.points},
                {"span", jnum(r.fit.span)}};
    j["target_exponent"] = r.target_exponent;
    j["criterion"] = r.criterion;
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["rows"] = r.rows.size();
    j["notes"] = r.notes;
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : r.meta) meta[k] = v;
    j["meta"] = meta;
    j["seconds"] = r.seconds;
    return j.dump(2) + "\n";
}

std::string report_table(const ComparisonReport& r) {
    std::ostringstream os;
    os << "lambda,point,actual_re,actual_im,predicted_re,predicted_im,remainder_abs,truncation_bound\n";
    for (const auto& row : r.rows)
        os << num(row.lambda) << ',' << csv_field(row.point) << ',' << num(row.actual.real()) << ','
           << num(row.actual.imag()) << ',' << num(row.predicted.real()) << ',' << num(row.predicted.imag()) << ','
           << num(row.remainder_abs) << ',' << num(row.truncation_bound) << '\n';
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path p(path);
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    out.close();
    if (!out) throw IoError("write failed for " + path);
}

std::string write_report(const ComparisonReport& r, const std::string& dir) {
    const std::string base = (std::filesystem::path(dir) / r.id).string();
    write_text_file(base + ".csv", report_table(r));
    write_text_file(base + ".report", report_document(r));
    return base + ".report";
}

ReportSummary read_report_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": not a report document (" + e.what() + ")");
    }
    if (j.value("format", "") != "qci-report") throw IoError(path + ": not a report document");
    auto number = [&](const nlohmann::json& v) {
        return v.is_number() ? v.get<double>() : std::stod(v.get<std::string>());
    };
    ReportSummary s;
    s.path = path;
    s.id = j.at("id").get<std::string>();
    s.target = j.at("target").get<std::string>();
    s.criterion = j.at("criterion").get<std::string>();
    const auto& fit = j.at("fit");
    s.beta = number(fit.at("beta"));
    s.ci_lo = number(fit.at("ci95").at(0));
    s.ci_hi = number(fit.at("ci95").at(1));
    s.points = fit.at("points").get<std::size_t>();
    s.threshold = j.at("threshold").get<double>();
    s.pass = j.at("pass").get<bool>();
    s.seconds = j.at("seconds").get<double>();
    return s;
}

std::string summary_table(const std::vector<ReportSummary>& rows) {
    std::ostringstream os;
    os << "id,target,beta,ci_lo,ci_hi,points,criterion,pass,seconds,path\n";
    for (const auto& s : rows)
        os << csv_field(s.id) << ',' << s.target << ',' << num(s.beta) << ',' << num(s.ci_lo) << ','
           << num(s.ci_hi) << ',' << s.points << ',' << csv_field(s.criterion) << ',' << (s.pass ? "pass" : "fail")
           << ',' << num(s.seconds) << ',' << csv_field(s.path) << '\n';
    return os.str();
}

}  // namespace qci
