#include "qmoo/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace qmoo {

void RunTrace::write_csv(std::ostream& out) const {
    out << "iter,fevals,hv,hv_norm\n";
    for (const auto& rec : records) {
        out << rec.iteration << ',' << rec.fevals << ',' << format_double(rec.hv) << ',';
        if (hv_ideal > 0.0) out << format_double(rec.hv / hv_ideal);
        out << '\n';
    }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::vector<TraceRow> rows;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trace CSV is empty");
    if (line != "iter,fevals,hv,hv_norm")
        throw ParseError("trace CSV has unexpected header: " + line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        TraceRow row;
        try {
            std::getline(ss, field, ',');
            row.iteration = std::stol(field);
            std::getline(ss, field, ',');
            row.fevals = std::stol(field);
            std::getline(ss, field, ',');
            row.hv = std::stod(field);
            if (std::getline(ss, field, ',') && !field.empty()) {
                row.hv_norm = std::stod(field);
                row.has_norm = true;
            }
        } catch (const std::exception&) {
            throw ParseError("trace CSV parse error at line " + std::to_string(line_no));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qmoo
