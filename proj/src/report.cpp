#include "surprise/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "surprise/version.hpp"

namespace surprise {

std::string report_header(const std::string& command, std::uint64_t seed,
                          const std::vector<std::string>& flags) {
    std::string h;
    h += "# surprise " + std::string(kVersion) + "\n";
    h += "# command: " + command + "\n";
    h += "# seed: " + std::to_string(seed) + "\n";
    std::string joined;
    for (const auto& f : flags) {
        if (!joined.empty()) joined += " ";
        joined += f;
    }
    h += "# flags: " + joined + "\n";
    return h;
}

std::string format_statistic(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string format_p(double p) {
    char buf[64];
    if (p >= 1e-3 || p == 0.0) {
        std::snprintf(buf, sizeof(buf), "%.4f", p);
    } else {
        std::snprintf(buf, sizeof(buf), "%.3e", p);
    }
    return buf;
}

std::string test_result_tsv(const TestResult& result) {
    return format_statistic(result.statistic) + "\t" + std::to_string(result.df) + "\t" +
           format_p(result.p_value) + "\n";
}

std::string test_result_json(const TestResult& result) {
    nlohmann::json j;
    j["statistic"] = result.statistic;
    j["df"] = result.df;
    j["p_value"] = result.p_value;
    return j.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace surprise
