#ifndef PJD_REPORT_HPP
#define PJD_REPORT_HPP

#include <string>
#include <vector>

namespace pjd {

/// One row of a validation / feasibility report: a named check, whether it
/// passed, and how much slack was left (negative margin = failed by that much).
struct CheckRow {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckRow> rows;

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
    void add(std::string name, bool pass, double margin, std::string detail = "") {
        rows.push_back({std::move(name), pass, margin, std::move(detail)});
    }
};

} // namespace pjd

#endif
