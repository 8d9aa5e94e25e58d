#include "spatlasso/panel_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "spatlasso/csvio.hpp"
#include "spatlasso/norminv.hpp"

namespace spatlasso {

RawPanel parse_panel_csv(const std::string& text) {
    CsvTable t = parse_csv(text, true);
    if (t.header.size() < 2) throw InvalidInput("panel CSV: need a time column and at least one location");
    if (t.rows.empty()) throw InvalidInput("panel CSV: no data rows");
    RawPanel panel;
    panel.location_labels.assign(t.header.begin() + 1, t.header.end());
    const int n = static_cast<int>(panel.location_labels.size());
    const int T = static_cast<int>(t.rows.size());
    panel.values = Matrix(T, n);
    panel.time_labels.reserve(static_cast<std::size_t>(T));
    for (int r = 0; r < T; ++r) {
        const auto& row = t.rows[static_cast<std::size_t>(r)];
        panel.time_labels.push_back(row[0]);
        for (int c = 0; c < n; ++c) {
            try {
                panel.values(r, c) = parse_double(row[static_cast<std::size_t>(c + 1)], true);
            } catch (const InvalidInput& e) {
                std::ostringstream msg;
                msg << e.what() << " (data row " << r + 1 << ", column '"
                    << panel.location_labels[static_cast<std::size_t>(c)] << "')";
                throw InvalidInput(msg.str());
            }
        }
    }
    std::vector<std::string> sorted_labels = panel.location_labels;
    std::sort(sorted_labels.begin(), sorted_labels.end());
    if (std::adjacent_find(sorted_labels.begin(), sorted_labels.end()) != sorted_labels.end()) {
        throw InvalidInput("panel CSV: duplicate location labels");
    }
    return panel;
}

RawPanel read_panel_csv(const std::string& path) { return parse_panel_csv(read_text_file(path)); }

std::string panel_csv(const RawPanel& panel) {
    std::string out = "t";
    for (const auto& l : panel.location_labels) {
        out.push_back(',');
        out += l;
    }
    out.push_back('\n');
    for (int r = 0; r < panel.T(); ++r) {
        out += panel.time_labels[static_cast<std::size_t>(r)];
        for (int c = 0; c < panel.n(); ++c) {
            out.push_back(',');
            out += format_double(panel.values(r, c));
        }
        out.push_back('\n');
    }
    return out;
}

void write_panel_csv(const std::string& path, const RawPanel& panel) {
    write_text_file(path, panel_csv(panel));
}

RawPanel make_raw_panel(const Matrix& values, std::vector<std::string> time_labels,
                        std::vector<std::string> location_labels) {
    RawPanel panel;
    panel.values = values;
    if (time_labels.empty()) {
        for (int t = 1; t <= values.rows(); ++t) time_labels.push_back(std::to_string(t));
    }
    if (location_labels.empty()) {
        for (int i = 1; i <= values.cols(); ++i) location_labels.push_back("loc_" + std::to_string(i));
    }
    if (static_cast<int>(time_labels.size()) != values.rows() ||
        static_cast<int>(location_labels.size()) != values.cols()) {
        throw InvalidInput("make_raw_panel: label lengths do not match values");
    }
    panel.time_labels = std::move(time_labels);
    panel.location_labels = std::move(location_labels);
    return panel;
}

RawPanel screen_locations(const RawPanel& panel, double max_missing_fraction, ScreenReport* report) {
    if (max_missing_fraction < 0.0 || max_missing_fraction > 1.0) {
        throw InvalidInput("screen_locations: max_missing_fraction outside [0,1]");
    }
    const int T = panel.T();
    const int n = panel.n();
    std::vector<int> kept;
    ScreenReport local;
    for (int c = 0; c < n; ++c) {
        int missing = 0;
        for (int r = 0; r < T; ++r) {
            if (std::isnan(panel.values(r, c))) ++missing;
        }
        if (static_cast<double>(missing) / static_cast<double>(T) > max_missing_fraction) {
            local.dropped_locations.push_back(panel.location_labels[static_cast<std::size_t>(c)]);
        } else {
            kept.push_back(c);
        }
    }
    if (kept.empty()) throw InvalidInput("screen_locations: every location exceeds the missing threshold");

    RawPanel out;
    out.time_labels = panel.time_labels;
    out.values = Matrix(T, static_cast<int>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out.location_labels.push_back(panel.location_labels[static_cast<std::size_t>(kept[k])]);
        out.values.col(static_cast<int>(k)) = panel.values.col(kept[k]);
    }
    // LOCF, then back-fill anything before the first observation.
    for (int c = 0; c < out.n(); ++c) {
        double last = std::numeric_limits<double>::quiet_NaN();
        for (int r = 0; r < T; ++r) {
            if (std::isnan(out.values(r, c))) {
                if (!std::isnan(last)) {
                    out.values(r, c) = last;
                    ++local.filled_cells;
                }
            } else {
                last = out.values(r, c);
            }
        }
        double first = std::numeric_limits<double>::quiet_NaN();
        for (int r = 0; r < T; ++r) {
            if (!std::isnan(out.values(r, c))) {
                first = out.values(r, c);
                break;
            }
        }
        if (std::isnan(first)) throw InvalidInput("screen_locations: location with no observations survived screening");
        for (int r = 0; r < T && std::isnan(out.values(r, c)); ++r) {
            out.values(r, c) = first;
            ++local.filled_cells;
        }
    }
    if (report) *report = std::move(local);
    return out;
}

std::pair<PanelObservations, TransformState> pit_to_normal(const RawPanel& panel) {
    const int T = panel.T();
    const int n = panel.n();
    if (!panel.values.allFinite()) {
        throw InvalidInput("pit_to_normal: panel contains missing values; screen it first");
    }
    Matrix scores(T, n);
    TransformState state;
    state.T = T;
    state.location_labels = panel.location_labels;
    state.values.resize(static_cast<std::size_t>(n));
    state.scores.resize(static_cast<std::size_t>(n));

    for (int c = 0; c < n; ++c) {
        std::vector<int> order(static_cast<std::size_t>(T));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return panel.values(a, c) < panel.values(b, c); });
        if (panel.values(order.front(), c) == panel.values(order.back(), c)) {
            throw InvalidInput("pit_to_normal: constant column '" +
                               panel.location_labels[static_cast<std::size_t>(c)] + "'");
        }
        // Average ranks over ties, then map rank r to Phi^{-1}((r - 0.5)/T).
        int k = 0;
        while (k < T) {
            int k2 = k;
            while (k2 + 1 < T && panel.values(order[static_cast<std::size_t>(k2 + 1)], c) ==
                                     panel.values(order[static_cast<std::size_t>(k)], c)) {
                ++k2;
            }
            double avg_rank = 0.5 * static_cast<double>((k + 1) + (k2 + 1));
            double score = stdnormal_quantile((avg_rank - 0.5) / static_cast<double>(T));
            for (int j = k; j <= k2; ++j) {
                scores(order[static_cast<std::size_t>(j)], c) = score;
            }
            state.values[static_cast<std::size_t>(c)].push_back(
                panel.values(order[static_cast<std::size_t>(k)], c));
            state.scores[static_cast<std::size_t>(c)].push_back(score);
            k = k2 + 1;
        }
    }
    return {PanelObservations(std::move(scores)), std::move(state)};
}

Matrix normal_to_original(const Matrix& scores, const TransformState& state, int* clamped) {
    const int n = static_cast<int>(scores.cols());
    if (n != static_cast<int>(state.values.size())) {
        throw InvalidInput("normal_to_original: state does not match score panel width");
    }
    Matrix out(scores.rows(), n);
    int clamp_count = 0;
    for (int c = 0; c < n; ++c) {
        const auto& vs = state.values[static_cast<std::size_t>(c)];
        const auto& ss = state.scores[static_cast<std::size_t>(c)];
        if (vs.size() != ss.size() || vs.empty()) throw InvalidInput("normal_to_original: corrupt state");
        for (int r = 0; r < scores.rows(); ++r) {
            double s = scores(r, c);
            if (!std::isfinite(s)) throw InvalidInput("normal_to_original: non-finite score");
            if (s <= ss.front()) {
                if (s < ss.front()) ++clamp_count;
                out(r, c) = vs.front();
                continue;
            }
            if (s >= ss.back()) {
                if (s > ss.back()) ++clamp_count;
                out(r, c) = vs.back();
                continue;
            }
            auto it = std::lower_bound(ss.begin(), ss.end(), s);
            std::size_t hi = static_cast<std::size_t>(it - ss.begin());
            if (ss[hi] == s) {
                out(r, c) = vs[hi];
                continue;
            }
            std::size_t lo = hi - 1;
            double frac = (s - ss[lo]) / (ss[hi] - ss[lo]);
            out(r, c) = vs[lo] + frac * (vs[hi] - vs[lo]);
        }
    }
    if (clamped) *clamped = clamp_count;
    return out;
}

std::string transform_state_json(const TransformState& state) {
    nlohmann::ordered_json doc;
    doc["T"] = state.T;
    nlohmann::ordered_json locs;
    for (std::size_t c = 0; c < state.location_labels.size(); ++c) {
        nlohmann::ordered_json entry;
        entry["values"] = state.values[c];
        entry["scores"] = state.scores[c];
        locs[state.location_labels[c]] = std::move(entry);
    }
    doc["locations"] = std::move(locs);
    return doc.dump(2) + "\n";
}

TransformState transform_state_from_json(const std::string& text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("transform state: invalid JSON: ") + e.what());
    }
    TransformState state;
    try {
        state.T = doc.at("T").get<int>();
        for (const auto& [label, entry] : doc.at("locations").items()) {
            state.location_labels.push_back(label);
            state.values.push_back(entry.at("values").get<std::vector<double>>());
            state.scores.push_back(entry.at("scores").get<std::vector<double>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("transform state: missing field: ") + e.what());
    }
    return state;
}

}  // namespace spatlasso
