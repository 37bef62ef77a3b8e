#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qci/config.hpp"
#include "qci/error.hpp"
#include "qci/geometry.hpp"
#include "qci/parallel.hpp"
#include "qci/report.hpp"
#include "qci/simd.hpp"
#include "qci/spectrum.hpp"
#include "qci/spectrum_io.hpp"
#include "qci/weyl.hpp"

namespace fs = std::filesystem;
using namespace qci;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

struct Common {
    std::string config;
    std::string out;
    int threads = 0;
};

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

class RunLog {
public:
    void line(const std::string& s) {
        text_ << timestamp() << "  " << s << '\n';
        std::cerr << s << '\n';
    }
    void save(const std::string& path) { write_text_file(path, text_.str()); }

private:
    std::ostringstream text_;
};

ExperimentConfig prepare(const Common& c, const std::string& expected_target, RunLog& log) {
    auto cfg = load_config(c.config);
    if (!expected_target.empty() && cfg.target != expected_target)
        throw ConfigError(c.config + ": target is '" + cfg.target + "', expected '" + expected_target + "'");
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (c.threads > 0) cfg.threads = c.threads;
    if (cfg.threads > 0) set_thread_count(cfg.threads);
    fs::create_directories(cfg.output_dir);
    log.line("config " + c.config + " (id " + cfg.id + ", target " + cfg.target + ")");
    log.line("threads " + std::to_string(thread_count()) + ", isa " +
             std::string(simd::isa_name(simd::active().isa)) + ", seed " + std::to_string(cfg.seed));
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& suffix) {
    return (fs::path(cfg.output_dir) / (cfg.id + suffix)).string();
}

int cmd_spectrum(const Common& c, bool samples) {
    RunLog log;
    const auto cfg = prepare(c, "spectrum", log);
    const auto system = build_system(cfg.system);
    JointSpectrum spec;
    if (system.kind() == ModelKind::SurfaceOfRevolution) {
        SorSpectrumOptions o;
        o.grid_size = cfg.grid_size;
        o.richardson = cfg.richardson;
        o.m_cap = cfg.m_cap;
        o.probes = cfg.probes;
        o.keep_samples = samples;
        spec = build_sor_spectrum(system.profile(), cfg.lam_max, o);
    } else if (system.kind() == ModelKind::FlatTorus) {
        spec = enumerate_torus(system.dim(), SpectralRegion::ball(system.dim(), cfg.lam_max));
    } else {
        throw ConfigError("spectra are available for tori and surfaces of revolution");
    }
    const auto csv = out_path(cfg, ".spectrum.csv");
    write_spectrum_table(spec, csv, samples ? out_path(cfg, ".spectrum.bin") : "");
    log.line("wrote " + csv + " (" + std::to_string(spec.size()) + " pairs, " + spec.completeness + ")");
    log.save(out_path(cfg, ".spectrum.log"));
    std::cout << csv << '\n';
    return kExitPass;
}

int cmd_geometry(const Common& c) {
    RunLog log;
    const auto cfg = prepare(c, "geometry", log);
    const auto system = build_system(cfg.system);
    auto grid = default_scan_grid(system, cfg.geometry_cells, cfg.geometry_phi_cells);
    grid.refine = cfg.geometry_refine;
    const auto report = scan_regions(system, grid);
    const auto csv = out_path(cfg, ".scan.csv");
    report.write_csv(csv);
    std::ostringstream os;
    os.precision(10);
    os << report.cells.size() << " cells, " << report.rank_drop_count() << " with rank drop, "
       << report.degenerate_count() << " degenerate; critical meridians:";
    for (double s : report.critical_meridians) os << ' ' << s;
    if (report.critical_meridians.empty()) os << " none";
    log.line(os.str());
    for (const auto& [lo, hi] : report.degenerate_sigma_bands()) {
        std::ostringstream b;
        b.precision(10);
        b << "degenerate sigma band [" << lo << ", " << hi << "]";
        log.line(b.str());
    }
    log.line("wrote " + csv);
    log.save(out_path(cfg, ".scan.log"));
    std::cout << csv << '\n';
    return kExitPass;
}

int cmd_verify(const Common& c) {
    RunLog log;
    const auto cfg = prepare(c, "", log);
    const auto rep = verify(cfg);
    for (const auto& n : rep.notes) log.line("note: " + n);
    log.line("fit: " + rep.fit.describe());
    const auto path = write_report(rep, cfg.output_dir);
    log.line(std::string(rep.pass ? "PASS " : "FAIL ") + rep.criterion + " (" + std::to_string(rep.seconds) + " s)");
    log.line("wrote " + path);
    log.save(out_path(cfg, ".log"));
    std::cout << path << '\n';
    return rep.pass ? kExitPass : kExitFail;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out) {
    std::vector<ReportSummary> rows;
    for (const auto& f : files) rows.push_back(read_report_summary(f));
    const auto table = summary_table(rows);
    if (!out.empty()) write_text_file(out, table);
    std::cout << table;
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint spectral function experiments for quantum completely integrable systems"};
    app.require_subcommand(1);
    Common common;
    bool samples = false;
    std::vector<std::string> reports;
    std::string summary_out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", common.config, "experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", common.out, "output directory (overrides output.dir)");
        sub->add_option("-t,--threads", common.threads, "worker threads (default: QCI_THREADS or all cores)")
            ->check(CLI::NonNegativeNumber);
    };
    auto* spectrum = app.add_subcommand("spectrum", "build a joint spectrum and export it as a table");
    add_common(spectrum);
    spectrum->add_flag("--samples", samples, "also write radial samples to a binary file");
    auto* geometry = app.add_subcommand("geometry", "scan the fiber rank condition and export the grid");
    add_common(geometry);
    auto* verify_cmd = app.add_subcommand("verify", "compare kernels against leading terms and fit exponents");
    add_common(verify_cmd);
    auto* report = app.add_subcommand("report", "merge reports into a summary table");
    report->add_option("reports", reports, "report documents")->required()->check(CLI::ExistingFile);
    report->add_option("-o,--out", summary_out, "also write the table to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*spectrum) return cmd_spectrum(common, samples);
        if (*geometry) return cmd_geometry(common);
        if (*verify_cmd) return cmd_verify(common);
        if (*report) return cmd_report(reports, summary_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
