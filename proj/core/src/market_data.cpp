#include "optport/market_data.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace optport {

namespace {

using nlohmann::json;

Eigen::VectorXd to_vector(const json& j, const char* field) {
    if (!j.is_array()) throw ParseError(std::string("field '") + field + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& e : j) {
        if (!e.is_number()) throw ParseError(std::string("field '") + field + "' must be numeric");
        v[i++] = e.get<double>();
    }
    return v;
}

const json& member(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw ParseError(std::string("missing field '") + field + "'");
    return *it;
}

double to_scalar(const json& j, const char* field) {
    const json& e = member(j, field);
    if (!e.is_number()) throw ParseError(std::string("field '") + field + "' must be a number");
    return e.get<double>();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number in " + context + ", got '" + s + "'");
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

} // namespace

void MarketModel::validate() const {
    const Eigen::Index n = spot.size();
    if (n < 1) throw ValidationError("model must contain at least one stock");
    if (static_cast<Eigen::Index>(names.size()) != n || mu_ann.size() != n ||
        sigma_ann.size() != n || corr.rows() != n || corr.cols() != n)
        throw ValidationError("names, spot, mu_ann, sigma_ann and corr must have matching sizes");
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) throw ValidationError("stock names must be non-empty");
        if (!seen.insert(name).second)
            throw ValidationError("duplicate stock name '" + name + "'");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(spot[i] > 0.0) || !std::isfinite(spot[i]))
            throw ValidationError("spot prices must be positive");
        if (!(sigma_ann[i] > 0.0) || !std::isfinite(sigma_ann[i]))
            throw ValidationError("volatilities must be positive");
        if (!std::isfinite(mu_ann[i]))
            throw ValidationError("drifts must be finite");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(corr(i, i) - 1.0) > 1e-12)
            throw ValidationError("correlation matrix must have unit diagonal");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(corr(i, j)) > 1.0 + 1e-12)
                throw ValidationError("correlations must lie in [-1, 1]");
            if (std::abs(corr(i, j) - corr(j, i)) > 1e-12)
                throw ValidationError("correlation matrix must be symmetric");
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
        throw ValidationError("correlation matrix must be positive definite");
    if (!(nu > 2.0) || !std::isfinite(nu))
        throw ValidationError("tail index nu must exceed 2 so return variances exist");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("horizon dt must be positive");
    if (!std::isfinite(r))
        throw ValidationError("rate r must be finite");
}

MarketModel load_market(const std::string& path) {
    const std::filesystem::path p(path);
    const auto ext = p.extension().string();
    if (ext == ".json") return load_market_json(path);
    if (ext == ".csv") {
        const auto corr_path = p.parent_path() / "corr.csv";
        return load_market_csv(path, corr_path.string());
    }
    throw ParseError("unsupported market file extension '" + ext + "' (want .json or .csv)");
}

MarketModel load_market_json(const std::string& path) {
    auto in = open_or_throw(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_market_json(buf.str(), path);
}

MarketModel parse_market_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in '" + origin + "': " + e.what());
    }
    if (!j.is_object()) throw ParseError("market JSON must be an object");

    MarketModel m;
    const json& names = member(j, "names");
    if (!names.is_array()) throw ParseError("field 'names' must be an array");
    for (const auto& e : names) {
        if (!e.is_string()) throw ParseError("field 'names' must contain strings");
        m.names.push_back(e.get<std::string>());
    }
    m.spot = to_vector(member(j, "spot"), "spot");
    m.mu_ann = to_vector(member(j, "mu_ann"), "mu_ann");
    m.sigma_ann = to_vector(member(j, "sigma_ann"), "sigma_ann");

    const json& corr = member(j, "corr");
    if (!corr.is_array()) throw ParseError("field 'corr' must be an array of rows");
    const auto n = static_cast<Eigen::Index>(corr.size());
    m.corr.resize(n, n);
    Eigen::Index i = 0;
    for (const auto& row : corr) {
        const Eigen::VectorXd v = to_vector(row, "corr");
        if (v.size() != n) throw ParseError("field 'corr' must be square");
        m.corr.row(i++) = v.transpose();
    }
    m.nu = to_scalar(j, "nu");
    m.dt = to_scalar(j, "dt");
    m.r = to_scalar(j, "r");
    m.validate();
    return m;
}

MarketModel load_market_csv(const std::string& market_csv, const std::string& corr_csv) {
    auto in = open_or_throw(market_csv);
    MarketModel m;
    bool have_nu = false, have_dt = false, have_r = false, have_header = false;
    std::vector<double> spot, mu_ann, sigma_ann;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto cells = split_csv(trim(line.substr(1)));
            if (cells.size() != 2)
                throw ParseError("scalar rows must look like '# name,value' in '" + market_csv + "'");
            const double value = parse_number(cells[1], "scalar row '" + cells[0] + "'");
            if (cells[0] == "nu") { m.nu = value; have_nu = true; }
            else if (cells[0] == "dt") { m.dt = value; have_dt = true; }
            else if (cells[0] == "r") { m.r = value; have_r = true; }
            else throw ParseError("unknown scalar '" + cells[0] + "' in '" + market_csv + "'");
            continue;
        }
        const auto cells = split_csv(line);
        if (!have_header) {
            if (cells != std::vector<std::string>{"name", "spot", "mu_ann", "sigma_ann"})
                throw ParseError("market csv header must be 'name,spot,mu_ann,sigma_ann'");
            have_header = true;
            continue;
        }
        if (cells.size() != 4)
            throw ParseError("market csv rows must have 4 cells, got " +
                             std::to_string(cells.size()));
        m.names.push_back(cells[0]);
        spot.push_back(parse_number(cells[1], "spot column"));
        mu_ann.push_back(parse_number(cells[2], "mu_ann column"));
        sigma_ann.push_back(parse_number(cells[3], "sigma_ann column"));
    }
    if (!have_header) throw ParseError("market csv '" + market_csv + "' has no header row");
    if (!(have_nu && have_dt && have_r))
        throw ParseError("market csv must declare '# nu,...', '# dt,...' and '# r,...'");

    const auto n = static_cast<Eigen::Index>(spot.size());
    m.spot = Eigen::Map<const Eigen::VectorXd>(spot.data(), n);
    m.mu_ann = Eigen::Map<const Eigen::VectorXd>(mu_ann.data(), n);
    m.sigma_ann = Eigen::Map<const Eigen::VectorXd>(sigma_ann.data(), n);

    auto cin = open_or_throw(corr_csv);
    m.corr.resize(n, n);
    Eigen::Index row = 0;
    while (std::getline(cin, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (row >= n) throw ParseError("correlation csv has more rows than stocks");
        const auto cells = split_csv(line);
        if (static_cast<Eigen::Index>(cells.size()) != n)
            throw ParseError("correlation csv rows must have " + std::to_string(n) + " cells");
        for (Eigen::Index j = 0; j < n; ++j)
            m.corr(row, j) = parse_number(cells[static_cast<std::size_t>(j)], "correlation csv");
        ++row;
    }
    if (row != n) throw ParseError("correlation csv has fewer rows than stocks");
    m.validate();
    return m;
}

Eigen::MatrixXd build_covariance(const MarketModel& m) {
    m.validate();
    const Eigen::VectorXd d = m.spot.cwiseProduct(m.sigma_ann);
    return m.dt * d.asDiagonal() * m.corr * d.asDiagonal();
}

Eigen::VectorXd build_drift(const MarketModel& m) {
    m.validate();
    return m.dt * m.mu_ann.cwiseProduct(m.spot);
}

} // namespace optport
