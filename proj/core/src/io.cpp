#include "iscat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iscat/errors.hpp"

namespace iscat {
namespace io {

namespace {

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

void save_scattering(const ScatteringData& sd, const std::string& path) {
    nlohmann::json j;
    j["k"] = sd.k_grid;
    std::vector<double> re(sd.S.size()), im(sd.S.size());
    for (std::size_t i = 0; i < sd.S.size(); ++i) {
        re[i] = sd.S[i].real();
        im[i] = sd.S[i].imag();
    }
    j["S_re"] = re;
    j["S_im"] = im;
    j["kj"] = sd.kj;
    j["sj"] = sd.sj;
    j["resonance"] = sd.resonance;
    write_json(j, path);
}

ScatteringData load_scattering(const std::string& path) {
    auto j = read_json(path);
    ScatteringData sd;
    sd.k_grid = j.at("k").get<std::vector<double>>();
    auto re = j.at("S_re").get<std::vector<double>>();
    auto im = j.at("S_im").get<std::vector<double>>();
    if (re.size() != sd.k_grid.size() || im.size() != sd.k_grid.size())
        throw ConfigError("scattering JSON: column lengths differ");
    sd.S.resize(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) sd.S[i] = cplx(re[i], im[i]);
    sd.kj = j.at("kj").get<std::vector<double>>();
    sd.sj = j.at("sj").get<std::vector<double>>();
    sd.resonance = j.at("resonance").get<bool>();
    return sd;
}

void save_spectral(const SpectralMeasure& rho, const std::string& path) {
    nlohmann::json j;
    j["lambda"] = rho.lambda;
    j["w"] = rho.w;
    std::vector<std::vector<double>> atoms;
    for (auto& a : rho.atoms) atoms.push_back({a.first, a.second});
    j["atoms"] = atoms;
    write_json(j, path);
}

SpectralMeasure load_spectral(const std::string& path) {
    auto j = read_json(path);
    SpectralMeasure rho;
    rho.lambda = j.at("lambda").get<std::vector<double>>();
    rho.w = j.at("w").get<std::vector<double>>();
    for (auto& a : j.at("atoms")) rho.atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
    return rho;
}

void save_ifunction(const IFunctionData& data, const std::string& path) {
    nlohmann::json j;
    j["k"] = data.k_grid;
    std::vector<double> re(data.I.size()), im(data.I.size());
    for (std::size_t i = 0; i < data.I.size(); ++i) {
        re[i] = data.I[i].real();
        im[i] = data.I[i].imag();
    }
    j["I_re"] = re;
    j["I_im"] = im;
    j["r0"] = data.r0;
    std::vector<std::vector<double>> poles;
    for (auto& p : data.poles) poles.push_back({p.first, p.second});
    j["poles"] = poles;
    write_json(j, path);
}

IFunctionData load_ifunction(const std::string& path) {
    auto j = read_json(path);
    IFunctionData d;
    d.k_grid = j.at("k").get<std::vector<double>>();
    auto re = j.at("I_re").get<std::vector<double>>();
    auto im = j.at("I_im").get<std::vector<double>>();
    if (re.size() != d.k_grid.size()) throw ConfigError("I-function JSON: column lengths differ");
    d.I.resize(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) d.I[i] = cplx(re[i], im[i]);
    d.r0 = j.at("r0").get<double>();
    for (auto& p : j.at("poles")) d.poles.emplace_back(p[0].get<double>(), p[1].get<double>());
    return d;
}

void save_spectra(const mixed::TwoSpectra& ts, const std::string& path) {
    nlohmann::json j;
    j["lambda"] = ts.lambda;
    j["mu"] = ts.mu;
    j["h"] = ts.robin_h;
    write_json(j, path);
}

mixed::TwoSpectra load_spectra(const std::string& path) {
    auto j = read_json(path);
    mixed::TwoSpectra ts;
    ts.lambda = j.at("lambda").get<std::vector<double>>();
    ts.mu = j.at("mu").get<std::vector<double>>();
    ts.robin_h = j.at("h").get<double>();
    return ts;
}

void save_columns(const std::string& path, const std::vector<std::string>& names,
                  const std::vector<const std::vector<double>*>& cols) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << "\n";
    std::size_t rows = cols.empty() ? 0 : cols[0]->size();
    char buf[48];
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.12g", (*cols[c])[r]);
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
}

void save_marchenko_F(const MarchenkoKernel& F, const std::string& path) {
    std::vector<double> x(F.F.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = F.x0 + F.h * static_cast<double>(i);
    save_columns(path, {"x", "F", "F_S", "F_d"}, {&x, &F.F, &F.F_S, &F.F_d});
}

void save_cauchy_csv(const mixed::CauchyData& cd, const std::string& path) {
    std::vector<double> y(cd.K1.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = cd.h * static_cast<double>(i);
    save_columns(path, {"y", "K1", "K1x"}, {&y, &cd.K1, &cd.K1x});
}

mixed::CauchyData load_cauchy_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path);
    std::string line;
    std::getline(in, line);  // header
    mixed::CauchyData cd;
    std::vector<double> y;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        double vals[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(ss, tok, ',')) throw ConfigError("bad Cauchy CSV row: " + line);
            vals[c] = std::stod(tok);
        }
        y.push_back(vals[0]);
        cd.K1.push_back(vals[1]);
        cd.K1x.push_back(vals[2]);
    }
    if (y.size() < 5) throw ConfigError("Cauchy CSV too short");
    cd.h = y[1] - y[0];
    cd.K11 = cd.K1.back();
    return cd;
}

}  // namespace io
}  // namespace iscat
