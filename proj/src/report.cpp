#include "handuse/report.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "handuse/error.hpp"
#include "json.hpp"
#include "text.hpp"

namespace handuse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double value_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

// Clinical column accessors, in block column order.
std::vector<double> bilateral_scores(const ClinicalRecord& c) {
    return {value_or_nan(c.uems_total), value_or_nan(c.scim_total), value_or_nan(c.scim_self_care),
            value_or_nan(c.scim_respiration_sphincter), value_or_nan(c.scim_mobility)};
}

std::vector<double> unilateral_scores(const ClinicalRecord& c, bool dominant) {
    const auto& g = dominant ? c.grassp_dominant : c.grassp_nondominant;
    return {value_or_nan(dominant ? c.uems_dominant : c.uems_nondominant),
            value_or_nan(g.strength),
            value_or_nan(g.sens_dorsal),
            value_or_nan(g.sens_palmar),
            value_or_nan(g.sens_total),
            value_or_nan(g.prehension_ability),
            value_or_nan(g.prehension_performance),
            value_or_nan(g.total)};
}

std::vector<double> measure_values(const ParticipantMeasures& m, Block block) {
    switch (block) {
        case Block::BilateralVsBilateral:
            return {m.bilateral.perc_bi, m.bilateral.dur_bi_s, m.bilateral.num_bi_per_hour};
        case Block::DominantVsBilateral:
        case Block::DominantVsUnilateral:
            return {m.dominant.perc, m.dominant.dur_s, m.dominant.num_per_hour};
        case Block::NondominantVsBilateral:
        case Block::NondominantVsUnilateral:
            return {m.nondominant.perc, m.nondominant.dur_s, m.nondominant.num_per_hour};
    }
    return {};
}

std::vector<double> score_values(const ClinicalRecord& c, Block block) {
    switch (block) {
        case Block::BilateralVsBilateral:
        case Block::DominantVsBilateral:
        case Block::NondominantVsBilateral: return bilateral_scores(c);
        case Block::DominantVsUnilateral: return unilateral_scores(c, true);
        case Block::NondominantVsUnilateral: return unilateral_scores(c, false);
    }
    return {};
}

stats::Strength parse_strength(std::string_view s) {
    using stats::Strength;
    for (auto v : {Strength::Negligible, Strength::VeryWeak, Strength::Weak, Strength::Moderate, Strength::Strong,
                   Strength::VeryStrong})
        if (stats::to_string(v) == s) return v;
    throw ParseError(0, "unknown strength '" + std::string(s) + "'");
}

stats::Stars parse_stars(std::string_view s) {
    using stats::Stars;
    for (auto v : {Stars::None, Stars::One, Stars::Two, Stars::Three})
        if (stats::to_string(v) == s) return v;
    throw ParseError(0, "unknown stars '" + std::string(s) + "'");
}

stats::CellStatus parse_status(std::string_view s) {
    using stats::CellStatus;
    for (auto v : {CellStatus::Ok, CellStatus::InsufficientN, CellStatus::Undefined})
        if (stats::to_string(v) == s) return v;
    throw ParseError(0, "unknown cell status '" + std::string(s) + "'");
}

double rounded(double v) { return *text::to_double(text::sig6(v)); }

std::string median_iqr(const stats::Quartiles& q) {
    return text::sig6(q.median) + " (" + text::sig6(q.q1) + "-" + text::sig6(q.q3) + ")";
}

}  // namespace

std::string_view to_string(Block block) {
    switch (block) {
        case Block::BilateralVsBilateral: return "bilateral_vs_bilateral";
        case Block::DominantVsBilateral: return "dominant_vs_bilateral";
        case Block::NondominantVsBilateral: return "nondominant_vs_bilateral";
        case Block::DominantVsUnilateral: return "dominant_vs_unilateral";
        case Block::NondominantVsUnilateral: return "nondominant_vs_unilateral";
    }
    return "?";
}

Block parse_block(std::string_view name) {
    for (auto b : kAllBlocks)
        if (to_string(b) == name) return b;
    throw ArgumentError("unknown block '" + std::string(name) + "'");
}

std::vector<std::string> block_rows(Block block) {
    switch (block) {
        case Block::BilateralVsBilateral: return {"Perc_Bi", "Dur_Bi", "Num_Bi"};
        case Block::DominantVsBilateral:
        case Block::DominantVsUnilateral: return {"Perc_DH", "Dur_DH", "Num_DH"};
        case Block::NondominantVsBilateral:
        case Block::NondominantVsUnilateral: return {"Perc_NH", "Dur_NH", "Num_NH"};
    }
    return {};
}

std::vector<std::string> block_cols(Block block) {
    switch (block) {
        case Block::BilateralVsBilateral:
        case Block::DominantVsBilateral:
        case Block::NondominantVsBilateral: return {"UEMS_tot", "SCIM_TOT", "SCIM_S", "SCIM_RS", "SCIM_M"};
        case Block::DominantVsUnilateral:
        case Block::NondominantVsUnilateral:
            return {"UEMS", "GR-Str", "GR-Sens(dorsal)", "GR-Sens(palmar)", "GR-Sens", "GR-PA", "GR-PP", "GR-tot"};
    }
    return {};
}

CorrelationMatrix correlate_block(std::span<const ParticipantMeasures> measures,
                                  std::span<const ClinicalRecord> clinical, Block block,
                                  const stats::StrengthBands& bands) {
    CorrelationMatrix m;
    m.block = block;
    m.rows = block_rows(block);
    m.cols = block_cols(block);

    std::map<std::string, const ClinicalRecord*> by_id;
    for (const auto& c : clinical) by_id[c.participant_id] = &c;

    // Joined columns: xs[row][participant], ys[col][participant]
    std::vector<std::vector<double>> xs(m.rows.size()), ys(m.cols.size());
    for (const auto& pm : measures) {
        auto it = by_id.find(pm.participant_id);
        if (it == by_id.end()) continue;
        const auto mv = measure_values(pm, block);
        const auto sv = score_values(*it->second, block);
        for (std::size_t r = 0; r < mv.size(); ++r) xs[r].push_back(mv[r]);
        for (std::size_t c = 0; c < sv.size(); ++c) ys[c].push_back(sv[c]);
    }

    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        for (std::size_t c = 0; c < m.cols.size(); ++c) {
            stats::CorrelationCell cell;
            std::size_t complete = 0;
            for (std::size_t i = 0; i < xs[r].size(); ++i)
                if (!std::isnan(xs[r][i]) && !std::isnan(ys[c][i])) ++complete;
            cell.n = complete;
            if (complete < 3) {
                cell.status = stats::CellStatus::InsufficientN;
            } else {
                try {
                    cell = stats::spearman(xs[r], ys[c], bands);
                } catch (const UndefinedCorrelationError&) {
                    cell.status = stats::CellStatus::Undefined;
                }
            }
            if (cell.status != stats::CellStatus::Ok) {
                cell.rho = kNaN;
                cell.p = kNaN;
                cell.strength = stats::Strength::Negligible;
                cell.stars = stats::Stars::None;
            }
            m.cells.push_back(cell);
        }
    }
    return m;
}

std::vector<DominanceRow> dominance_comparison(std::span<const ParticipantMeasures> measures) {
    std::vector<DominanceRow> out;
    const char* names[] = {"Perc", "Dur", "Num"};
    for (int k = 0; k < 3; ++k) {
        std::vector<double> dom, nondom;
        for (const auto& m : measures) {
            const auto pick = [k](const HandUseMeasures& h) {
                return k == 0 ? h.perc : (k == 1 ? h.dur_s : h.num_per_hour);
            };
            dom.push_back(pick(m.dominant));
            nondom.push_back(pick(m.nondominant));
        }
        DominanceRow row;
        row.measure = names[k];
        if (!dom.empty()) {
            row.dominant = stats::quartiles(dom);
            row.nondominant = stats::quartiles(nondom);
        }
        try {
            row.test = stats::wilcoxon_signed_rank(dom, nondom);
        } catch (const Error& e) {
            row.error = e.what();
        }
        out.push_back(std::move(row));
    }
    return out;
}

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::Csv;
    if (name == "json-lines" || name == "jsonl") return Format::JsonLines;
    if (name == "heatmap-data" || name == "heatmap") return Format::Heatmap;
    throw ArgumentError("unknown output format '" + std::string(name) + "'");
}

std::string_view file_extension(Format format) {
    switch (format) {
        case Format::Csv: return ".csv";
        case Format::JsonLines: return ".jsonl";
        case Format::Heatmap: return ".heatmap.csv";
    }
    return "";
}

std::string emit(const CorrelationMatrix& m, Format format) {
    if (m.cells.size() != m.rows.size() * m.cols.size()) throw ArgumentError("matrix cells do not match labels");
    std::string s;
    if (format == Format::Csv) s = "block,measure,score,rho,p,n,strength,stars,status\n";
    if (format == Format::Heatmap) s = "row_label,col_label,rho,p,stars,strength\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        for (std::size_t c = 0; c < m.cols.size(); ++c) {
            const auto& cell = m.at(r, c);
            const bool ok = cell.status == stats::CellStatus::Ok;
            const std::string rho = ok ? text::sig6(cell.rho) : "";
            const std::string p = ok ? text::sig6(cell.p) : "";
            switch (format) {
                case Format::Csv:
                    s += std::string(to_string(m.block)) + ',' + m.rows[r] + ',' + m.cols[c] + ',' + rho + ',' + p +
                         ',' + std::to_string(cell.n) + ',' + std::string(stats::to_string(cell.strength)) + ',' +
                         std::string(stats::to_string(cell.stars)) + ',' + std::string(stats::to_string(cell.status)) +
                         '\n';
                    break;
                case Format::Heatmap:
                    s += m.rows[r] + ',' + m.cols[c] + ',' + rho + ',' + p + ',' +
                         std::string(stats::to_string(cell.stars)) + ',' + std::string(stats::to_string(cell.strength)) +
                         '\n';
                    break;
                case Format::JsonLines: {
                    nlohmann::ordered_json j;
                    j["block"] = to_string(m.block);
                    j["measure"] = m.rows[r];
                    j["score"] = m.cols[c];
                    j["rho"] = ok ? nlohmann::ordered_json(rounded(cell.rho)) : nlohmann::ordered_json(nullptr);
                    j["p"] = ok ? nlohmann::ordered_json(rounded(cell.p)) : nlohmann::ordered_json(nullptr);
                    j["n"] = cell.n;
                    j["strength"] = stats::to_string(cell.strength);
                    j["stars"] = stats::to_string(cell.stars);
                    j["status"] = stats::to_string(cell.status);
                    s += j.dump() + '\n';
                    break;
                }
            }
        }
    }
    return s;
}

CorrelationMatrix parse_matrix(std::string_view body, Format format) {
    if (format == Format::Heatmap) throw ArgumentError("heatmap data does not carry a full matrix; parse csv or jsonl");
    CorrelationMatrix m;
    bool first = true;
    bool header = format == Format::Csv;
    std::vector<std::string_view> f;
    auto add_label = [](std::vector<std::string>& labels, const std::string& label) {
        for (const auto& l : labels)
            if (l == label) return;
        labels.push_back(label);
    };
    text::for_each_line(body, [&](std::size_t line, std::string_view l) {
        if (text::trim(l).empty()) return;
        if (header) {
            if (l != "block,measure,score,rho,p,n,strength,stars,status")
                throw ParseError(line, "unexpected matrix header");
            header = false;
            return;
        }
        std::string block, row, col, strength, stars, status;
        stats::CorrelationCell cell;
        if (format == Format::Csv) {
            text::split(l, ',', f);
            if (f.size() != 9) throw ParseError(line, "expected 9 fields");
            block = f[0];
            row = f[1];
            col = f[2];
            cell.rho = f[3].empty() ? kNaN : text::to_double(f[3]).value_or(kNaN);
            cell.p = f[4].empty() ? kNaN : text::to_double(f[4]).value_or(kNaN);
            auto n = text::to_int(f[5]);
            if (!n || *n < 0) throw ParseError(line, "bad n");
            cell.n = static_cast<std::size_t>(*n);
            strength = f[6];
            stars = f[7];
            status = f[8];
        } else {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(l);
                block = j.at("block").get<std::string>();
                row = j.at("measure").get<std::string>();
                col = j.at("score").get<std::string>();
                cell.rho = j.at("rho").is_null() ? kNaN : j.at("rho").get<double>();
                cell.p = j.at("p").is_null() ? kNaN : j.at("p").get<double>();
                cell.n = j.at("n").get<std::size_t>();
                strength = j.at("strength").get<std::string>();
                stars = j.at("stars").get<std::string>();
                status = j.at("status").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(line, e.what());
            }
        }
        cell.strength = parse_strength(strength);
        cell.stars = parse_stars(stars);
        cell.status = parse_status(status);
        const auto b = parse_block(block);
        if (first) {
            m.block = b;
            first = false;
        } else if (b != m.block) {
            throw ParseError(line, "mixed blocks in one matrix");
        }
        add_label(m.rows, row);
        add_label(m.cols, col);
        m.cells.push_back(cell);
    });
    if (m.cells.size() != m.rows.size() * m.cols.size()) throw ParseError(0, "matrix is not rectangular");
    return m;
}

namespace {

std::string csv_cell(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

}  // namespace

std::string emit(const Table& t, Format format) {
    if (format == Format::Heatmap) throw ArgumentError("heatmap-data applies to correlation matrices only");
    std::string s;
    if (format == Format::Csv) {
        for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + csv_cell(t.header[i]);
        s += '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_cell(row[i]);
            s += '\n';
        }
        return s;
    }
    for (const auto& row : t.rows) {
        nlohmann::ordered_json j;
        for (std::size_t i = 0; i < t.header.size() && i < row.size(); ++i) j[t.header[i]] = row[i];
        s += j.dump() + '\n';
    }
    return s;
}

Table dominance_table(std::span<const DominanceRow> rows) {
    Table t{{"measure", "dominant_median_iqr", "nondominant_median_iqr", "z", "p", "note"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({r.measure, median_iqr(r.dominant), median_iqr(r.nondominant),
                          r.test ? text::sig6(r.test->statistic) : "", r.test ? text::sig6(r.test->p) : "",
                          r.test ? (r.test->exact_p ? "exact p" : "normal p") : r.error});
    }
    return t;
}

Table method_summary_table(const MethodComparison& c) {
    Table t{{"method", "median", "q1", "q3", "fraction_above_0_8", "selected"}, {}};
    for (std::size_t m = 0; m < c.methods.size(); ++m) {
        const auto& s = c.summaries[m];
        t.rows.push_back({c.methods[m], text::sig6(s.median), text::sig6(s.q1), text::sig6(s.q3),
                          text::sig6(s.fraction_above_0_8), m == c.selected ? "1" : "0"});
    }
    return t;
}

Table f1_table(const MethodComparison& c) {
    Table t;
    t.header.push_back("participant_id");
    for (const auto& m : c.methods) t.header.push_back(m);
    for (std::size_t i = 0; i < c.participants.size(); ++i) {
        std::vector<std::string> row{c.participants[i]};
        for (double v : c.f1[i]) row.push_back(text::sig6(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table friedman_table(const stats::PosthocReport& r, std::span<const std::string> methods) {
    return {{"test", "statistic", "df", "p", "n", "k", "significant"},
            {{"friedman", text::sig6(r.omnibus.statistic), r.omnibus.df ? std::to_string(*r.omnibus.df) : "",
              text::sig6(r.omnibus.p), std::to_string(r.omnibus.n_effective), std::to_string(methods.size()),
              r.omnibus_significant ? "1" : "0"}}};
}

Table posthoc_table(const stats::PosthocReport& r, std::span<const std::string> methods) {
    Table t{{"method_i", "method_j", "mean_rank_difference", "z", "p_raw", "p_adjusted", "significant",
             "omnibus_significant"},
            {}};
    for (const auto& c : r.comparisons)
        t.rows.push_back({methods[c.method_i], methods[c.method_j], text::sig6(c.mean_rank_difference),
                          text::sig6(c.z), text::sig6(c.p_raw), text::sig6(c.p_adjusted), c.significant ? "1" : "0",
                          r.omnibus_significant ? "1" : "0"});
    return t;
}

}  // namespace handuse
