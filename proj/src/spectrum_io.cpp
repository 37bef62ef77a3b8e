#include "qci/spectrum_io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qci/error.hpp"

namespace qci {
namespace {

constexpr char kMagic[8] = {'Q', 'C', 'I', 'R', 'A', 'D', '0', '1'};

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join_params(const std::vector<double>& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) out += (i ? ";" : "") + fmt(p[i]);
    return out;
}

std::vector<double> split_params(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

}  // namespace

void write_spectrum_table(const JointSpectrum& spec, const std::string& csv_path,
                          const std::string& bin_path) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error("cannot write spectrum table '" + csv_path + "'");
    const bool sor = spec.system.kind() == ModelKind::SurfaceOfRevolution;
    const int n = spec.dim();
    out << "# qci-spectrum";
    if (sor) {
        const auto& prof = spec.system.profile();
        out << " kind=surface_of_revolution profile=" << prof.name()
            << " params=" << join_params(prof.params()) << " grid_size=" << spec.grid_size
            << " lam_max=" << fmt(spec.lam_max) << " m_cap=" << spec.m_cap
            << " richardson=" << (spec.richardson ? 1 : 0);
    } else {
        out << " kind=torus dim=" << n << " lam_max=" << fmt(spec.lam_max);
    }
    out << " count=" << spec.size() << "\n";
    if (sor) {
        out << "lam_1,lam_2,m,k,norm_cert\n";
    } else {
        for (int k = 0; k < n; ++k) out << "lam_" << k + 1 << ",";
        for (int k = 0; k < n; ++k) out << "k_" << k + 1 << ",";
        out << "norm_cert\n";
    }
    for (std::size_t j = 0; j < spec.size(); ++j) {
        for (int k = 0; k < n; ++k) out << fmt(spec.lam[k][j]) << ",";
        for (int k = 0; k < n; ++k) out << spec.qn[k][j] << ",";
        out << fmt(spec.norm_cert.empty() ? 0.0 : spec.norm_cert[j]) << "\n";
    }
    if (!out) throw Error("failed writing spectrum table '" + csv_path + "'");

    if (!bin_path.empty() && spec.has_samples()) {
        std::ofstream bin(bin_path, std::ios::binary);
        if (!bin) throw Error("cannot write radial samples '" + bin_path + "'");
        const std::uint64_t count = spec.size(), stride = spec.grid_size;
        bin.write(kMagic, sizeof kMagic);
        bin.write(reinterpret_cast<const char*>(&count), sizeof count);
        bin.write(reinterpret_cast<const char*>(&stride), sizeof stride);
        for (std::size_t j = 0; j < spec.size(); ++j) {
            const std::int32_t key[2] = {spec.qn[0][j], spec.qn[1][j]};
            bin.write(reinterpret_cast<const char*>(key), sizeof key);
            auto s = spec.radial_samples(j);
            bin.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size_bytes()));
        }
        if (!bin) throw Error("failed writing radial samples '" + bin_path + "'");
    }
}

JointSpectrum read_spectrum_table(const std::string& csv_path, const std::string& bin_path) {
    std::ifstream in(csv_path);
    if (!in) throw Error("cannot read spectrum table '" + csv_path + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("# qci-spectrum", 0) != 0) throw Error(csv_path + ": missing qci-spectrum header");
    std::map<std::string, std::string> meta;
    {
        std::stringstream ss(line.substr(14));
        std::string tok;
        while (ss >> tok)
            if (auto eq = tok.find('='); eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    JointSpectrum s;
    const bool sor = meta["kind"] == "surface_of_revolution";
    if (sor) {
        const std::string name = meta["profile"];
        s.system = make_surface_of_revolution(name.rfind("table:", 0) == 0
                                                  ? load_profile_table(name.substr(6))
                                                  : builtin_profile(name, split_params(meta["params"])));
        s.grid_size = std::stoi(meta["grid_size"]);
        s.m_cap = std::stoi(meta["m_cap"]);
        s.richardson = meta["richardson"] == "1";
    } else if (meta["kind"] == "torus") {
        s.system = make_torus(std::stoi(meta["dim"]));
    } else {
        throw Error(csv_path + ": unknown spectrum kind '" + meta["kind"] + "'");
    }
    s.lam_max = std::stod(meta["lam_max"]);
    const int n = s.system.dim();
    s.lam.assign(n, {});
    s.qn.assign(n, {});
    std::getline(in, line);  // column header
    int lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = split_csv(line);
        if (static_cast<int>(cols.size()) != 2 * n + 1)
            throw Error(csv_path + ":" + std::to_string(lineno) + ": wrong column count");
        for (int k = 0; k < n; ++k) s.lam[k].push_back(std::stod(cols[k]));
        for (int k = 0; k < n; ++k) s.qn[k].push_back(std::stoi(cols[n + k]));
        s.norm_cert.push_back(std::stod(cols[2 * n]));
    }
    s.coverage.lower = Vec::Constant(n, -s.lam_max);
    s.coverage.upper = Vec::Constant(n, s.lam_max);
    if (sor) {
        s.coverage.lower << -std::numeric_limits<double>::infinity(), -static_cast<double>(s.m_cap);
        s.coverage.upper << s.lam_max, static_cast<double>(s.m_cap);
    } else {
        s.coverage.norm_max = s.lam_max;
    }
    s.completeness = "imported from " + csv_path;

    if (sor && !bin_path.empty() && std::filesystem::exists(bin_path)) {
        std::ifstream bin(bin_path, std::ios::binary);
        char magic[8];
        std::uint64_t count = 0, stride = 0;
        bin.read(magic, sizeof magic);
        bin.read(reinterpret_cast<char*>(&count), sizeof count);
        bin.read(reinterpret_cast<char*>(&stride), sizeof stride);
        if (!bin || std::string(magic, 8) != std::string(kMagic, 8))
            throw Error(bin_path + ": not a radial sample file");
        if (count != s.size() || static_cast<int>(stride) != s.grid_size)
            throw Error(bin_path + ": does not match the spectrum table");
        s.samples.resize(count * stride);
        for (std::size_t j = 0; j < count; ++j) {
            std::int32_t key[2];
            bin.read(reinterpret_cast<char*>(key), sizeof key);
            if (key[0] != s.qn[0][j] || key[1] != s.qn[1][j])
                throw Error(bin_path + ": sample keys out of order");
            bin.read(reinterpret_cast<char*>(s.samples.data() + j * stride),
                     static_cast<std::streamsize>(stride * sizeof(double)));
        }
        if (!bin) throw Error(bin_path + ": truncated");
    }
    return s;
}

}  // namespace qci
