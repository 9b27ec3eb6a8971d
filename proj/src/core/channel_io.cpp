#include "core/channel_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace beeid {

ConditionalDistribution parse_channel_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("channel spec: invalid JSON: ") + e.what());
    }
    if (!j.contains("alphabet_in") || !j.contains("alphabet_out") || !j.contains("rows")) {
        throw std::runtime_error("channel spec: requires alphabet_in, alphabet_out, rows");
    }
    const int nin = j.at("alphabet_in").get<int>();
    const int nout = j.at("alphabet_out").get<int>();
    const auto& rows = j.at("rows");
    if (!rows.is_array() || static_cast<int>(rows.size()) != nin) {
        throw std::runtime_error("channel spec: rows must be an array of alphabet_in rows");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(nin) * nout);
    for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != nout) {
            throw std::runtime_error("channel spec: each row needs alphabet_out entries");
        }
        for (const auto& v : row) flat.push_back(v.get<double>());
    }
    try {
        return ConditionalDistribution(nin, nout, std::move(flat));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("channel spec: ") + e.what());
    }
}

ConditionalDistribution load_channel_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("channel spec: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_channel_json(ss.str());
}

std::string channel_to_json(const ConditionalDistribution& w) {
    nlohmann::json j;
    j["alphabet_in"] = w.in_size();
    j["alphabet_out"] = w.out_size();
    auto rows = nlohmann::json::array();
    for (int x = 0; x < w.in_size(); ++x) {
        auto row = nlohmann::json::array();
        for (int y = 0; y < w.out_size(); ++y) row.push_back(w(x, y));
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump();
}

}  // namespace beeid
