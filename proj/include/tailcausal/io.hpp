#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tailcausal/graph.hpp"
#include "tailcausal/simgen.hpp"
#include "tailcausal/tail_transform.hpp"

namespace tailcausal {

struct CsvTable {
    std::vector<std::string> headers;
    Eigen::MatrixXd values;
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Numeric CSV with a header row. Missing or non-numeric fields are
/// rejected.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path);
    CsvTable table;
    for (const auto& h : detail::split_line(line)) table.headers.push_back(detail::trim(h));
    const size_t ncol = table.headers.size();
    if (ncol == 0) throw std::runtime_error("read_csv: no columns in " + path);

    std::vector<double> data;
    size_t nrow = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_line(line);
        if (fields.size() != ncol)
            throw std::runtime_error("read_csv: row " + std::to_string(nrow + 1) +
                                     " has wrong field count in " + path);
        for (const auto& f : fields) {
            const std::string t = detail::trim(f);
            if (t.empty())
                throw std::runtime_error("read_csv: missing value at row " +
                                         std::to_string(nrow + 1) + " in " + path);
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(t, &used);
            } catch (const std::exception&) {
                throw std::runtime_error("read_csv: non-numeric field '" + t + "' in " + path);
            }
            if (used != t.size())
                throw std::runtime_error("read_csv: non-numeric field '" + t + "' in " + path);
            data.push_back(v);
        }
        ++nrow;
    }
    table.values.resize(static_cast<Eigen::Index>(nrow), static_cast<Eigen::Index>(ncol));
    for (size_t r = 0; r < nrow; ++r)
        for (size_t c = 0; c < ncol; ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                data[r * ncol + c];
    return table;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& headers,
                      const Eigen::MatrixXd& values) {
    if (static_cast<Eigen::Index>(headers.size()) != values.cols())
        throw std::invalid_argument("write_csv: header/column mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << std::setprecision(17);
    for (size_t c = 0; c < headers.size(); ++c) out << (c ? "," : "") << headers[c];
    out << "\n";
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << values(r, c);
        out << "\n";
    }
}

/// Splits a CSV table into a RawPanel given the proxy column names.
inline RawPanel panel_from_csv(const CsvTable& table, const std::vector<std::string>& proxy_cols) {
    std::vector<Eigen::Index> proxy_idx, data_idx;
    for (const auto& name : proxy_cols) {
        auto it = std::find(table.headers.begin(), table.headers.end(), name);
        if (it == table.headers.end())
            throw std::runtime_error("panel_from_csv: proxy column '" + name + "' not found");
        proxy_idx.push_back(static_cast<Eigen::Index>(it - table.headers.begin()));
    }
    for (Eigen::Index c = 0; c < table.values.cols(); ++c)
        if (std::find(proxy_idx.begin(), proxy_idx.end(), c) == proxy_idx.end())
            data_idx.push_back(c);

    RawPanel panel;
    panel.x.resize(table.values.rows(), static_cast<Eigen::Index>(data_idx.size()));
    for (size_t c = 0; c < data_idx.size(); ++c)
        panel.x.col(static_cast<Eigen::Index>(c)) = table.values.col(data_idx[c]);
    if (!proxy_idx.empty()) {
        Eigen::MatrixXd pr(table.values.rows(), static_cast<Eigen::Index>(proxy_idx.size()));
        for (size_t c = 0; c < proxy_idx.size(); ++c)
            pr.col(static_cast<Eigen::Index>(c)) = table.values.col(proxy_idx[c]);
        panel.proxy_raw = std::move(pr);
    }
    panel.validate();
    return panel;
}

// --- SimTruth --------------------------------------------------------------

inline nlohmann::json to_json(const SimTruth& truth) {
    nlohmann::json j;
    j["dag"] = to_json(truth.dag);
    j["edge_coefs"] = nlohmann::json::array();
    for (const auto& [edge, c] : truth.edge_coefs)
        j["edge_coefs"].push_back({edge.first, edge.second, c});
    j["confounders"] = nlohmann::json::array();
    for (size_t l = 0; l < truth.conf_exposure.size(); ++l) {
        nlohmann::json conf;
        conf["exposure"] = truth.conf_exposure[l];
        conf["coefs"] = truth.conf_coefs[l];
        conf["proxy_coef"] = l < truth.proxy_coefs.size() ? truth.proxy_coefs[l] : 0.0;
        j["confounders"].push_back(conf);
    }
    return j;
}

inline SimTruth truth_from_json(const nlohmann::json& j) {
    SimTruth truth(dag_from_json(j.at("dag")));
    for (const auto& e : j.at("edge_coefs"))
        truth.edge_coefs[{e.at(0).get<int>(), e.at(1).get<int>()}] = e.at(2).get<double>();
    if (j.contains("confounders")) {
        for (const auto& conf : j.at("confounders")) {
            truth.conf_exposure.push_back(conf.at("exposure").get<std::vector<int>>());
            truth.conf_coefs.push_back(conf.at("coefs").get<std::vector<double>>());
            truth.proxy_coefs.push_back(conf.at("proxy_coef").get<double>());
        }
    }
    return truth;
}

// --- TailSample cache bundle ------------------------------------------------

inline nlohmann::json to_json(const TailSample& s) {
    nlohmann::json j;
    j["u"] = s.u;
    j["k"] = s.k;
    j["origin_rows"] = s.origin_rows;
    j["underdetermined"] = s.underdetermined;
    j["z"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < s.z.rows(); ++r) {
        std::vector<double> row(s.z.row(r).begin(), s.z.row(r).end());
        j["z"].push_back(row);
    }
    if (s.proxy) {
        j["proxy"] = nlohmann::json::array();
        for (Eigen::Index r = 0; r < s.proxy->rows(); ++r) {
            std::vector<double> row(s.proxy->row(r).begin(), s.proxy->row(r).end());
            j["proxy"].push_back(row);
        }
    } else {
        j["proxy"] = nullptr;
    }
    return j;
}

inline TailSample tail_sample_from_json(const nlohmann::json& j) {
    TailSample s;
    s.u = j.at("u").get<double>();
    s.k = j.at("k").get<int>();
    s.origin_rows = j.at("origin_rows").get<std::vector<int>>();
    s.underdetermined = j.at("underdetermined").get<bool>();
    const auto& z = j.at("z");
    const auto rows = static_cast<Eigen::Index>(z.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(z.at(0).size()) : 0;
    s.z.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) s.z(r, c) = z.at(r).at(c).get<double>();
    if (!j.at("proxy").is_null()) {
        const auto& pj = j.at("proxy");
        const auto pcols = pj.empty() ? 0 : static_cast<Eigen::Index>(pj.at(0).size());
        Eigen::MatrixXd proxy(static_cast<Eigen::Index>(pj.size()), pcols);
        for (Eigen::Index r = 0; r < proxy.rows(); ++r)
            for (Eigen::Index c = 0; c < pcols; ++c) proxy(r, c) = pj.at(r).at(c).get<double>();
        s.proxy = std::move(proxy);
    }
    return s;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_text: cannot open " + path);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_text: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// FNV-1a, used for config identification in run records
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace tailcausal
