#include "iscat/potential.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "iscat/errors.hpp"

namespace iscat {

Potential::Potential(std::vector<double> samples, double h, double a)
    : q_(std::move(samples)), h_(h), a_(a) {
    if (q_.empty() || h <= 0.0) throw ConfigError("potential: empty sample set or bad step");
    grid_ = UniformGrid{0.0, h, q_.size()};
    if (a_ < 0.0 || a_ > grid_.back()) a_ = grid_.back();
    for (std::size_t i = 0; i < q_.size(); ++i) {
        if (!std::isfinite(q_[i]))
            throw SolverError(Err::NonFiniteSample, "potential sample " + std::to_string(i));
        if (grid_[i] > a_) q_[i] = 0.0;
        weight_ += (1.0 + grid_[i]) * std::abs(q_[i]) * h_;
    }
}

Potential Potential::from_function(const std::function<double(double)>& f, double x_max,
                                   double h, double a) {
    std::size_t n = static_cast<std::size_t>(std::round(x_max / h)) + 1;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = f(h * static_cast<double>(i));
    return Potential(std::move(q), h, a < 0.0 ? x_max : a);
}

double Potential::operator()(double x) const {
    // the sampled interpolant everywhere; samples past the support are zero,
    // so the read ramps to zero across one cell after a
    if (x < 0.0 || x > grid_.back()) return 0.0;
    return lerp_on(grid_, q_, x);
}

double Potential::sup_abs() const {
    double m = 0.0;
    for (double v : q_) m = std::max(m, std::abs(v));
    return m;
}

double Potential::support_edge() const {
    std::size_t i = q_.size();
    while (i > 0 && q_[i - 1] == 0.0) --i;
    if (i == 0) return 0.0;
    return grid_[std::min(i, q_.size() - 1)];
}

double Potential::sigma(double x) const {
    if (x < 0.0) x = 0.0;
    if (x >= grid_.back()) return 0.0;
    double s = 0.0;
    std::size_t i0 = grid_.cell(x);
    double x1 = grid_[i0 + 1];
    s += 0.5 * (std::abs((*this)(x)) + std::abs(q_[i0 + 1])) * (x1 - x);
    for (std::size_t i = i0 + 1; i + 1 < q_.size(); ++i)
        s += 0.5 * (std::abs(q_[i]) + std::abs(q_[i + 1])) * h_;
    return s;
}

double Potential::integral(double x) const {
    if (x < 0.0) x = 0.0;
    if (x >= grid_.back()) return 0.0;
    double s = 0.0;
    std::size_t i0 = grid_.cell(x);
    double x1 = grid_[i0 + 1];
    s += 0.5 * ((*this)(x) + q_[i0 + 1]) * (x1 - x);
    for (std::size_t i = i0 + 1; i + 1 < q_.size(); ++i) s += 0.5 * (q_[i] + q_[i + 1]) * h_;
    return s;
}

Potential Potential::resampled(double h) const {
    return from_function([this](double x) { return (*this)(x); }, grid_.back(), h, a_);
}

Potential Potential::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open potential file: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("h") || !j.contains("a") || !j.contains("q"))
        throw ConfigError("potential JSON needs fields h, a, q: " + path);
    std::vector<double> q = j["q"].get<std::vector<double>>();
    return Potential(std::move(q), j["h"].get<double>(), j["a"].get<double>());
}

void Potential::save_json(const std::string& path) const {
    nlohmann::json j;
    j["h"] = h_;
    j["a"] = a_;
    j["q"] = q_;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write potential file: " + path);
    out << j.dump(2) << "\n";
}

const char* to_string(Err e) {
    switch (e) {
        case Err::NonFiniteSample: return "NonFiniteSample";
        case Err::GridTooCoarse: return "GridTooCoarse";
        case Err::IterationDivergence: return "IterationDivergence";
        case Err::KappaMaxTooSmall: return "KappaMaxTooSmall";
        case Err::BranchAmbiguity: return "BranchAmbiguity";
        case Err::IndexMismatch: return "IndexMismatch";
        case Err::TailTooHeavy: return "TailTooHeavy";
        case Err::SingularFredholm: return "SingularFredholm";
        case Err::DiagonalTooNoisy: return "DiagonalTooNoisy";
        case Err::PronyIllConditioned: return "PronyIllConditioned";
        case Err::TailDivergence: return "TailDivergence";
        case Err::FitNotConverged: return "FitNotConverged";
        case Err::PoleOnGrid: return "PoleOnGrid";
        case Err::PeelingStalled: return "PeelingStalled";
        case Err::GNotPositive: return "GNotPositive";
        case Err::OrderOverflow: return "OrderOverflow";
        case Err::MatchingSingular: return "MatchingSingular";
        case Err::FredholmBreakdown: return "FredholmBreakdown";
        case Err::BracketingFailure: return "BracketingFailure";
        case Err::BasisIllConditioned: return "BasisIllConditioned";
        case Err::ContractionViolated: return "ContractionViolated";
    }
    return "UnknownError";
}

}  // namespace iscat
