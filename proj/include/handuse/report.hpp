#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "handuse/eval.hpp"
#include "handuse/ingest.hpp"
#include "handuse/measures.hpp"
#include "handuse/stats.hpp"

namespace handuse {

enum class Block : std::uint8_t {
    BilateralVsBilateral,
    DominantVsBilateral,
    NondominantVsBilateral,
    DominantVsUnilateral,
    NondominantVsUnilateral,
};

inline constexpr Block kAllBlocks[] = {Block::BilateralVsBilateral, Block::DominantVsBilateral,
                                       Block::NondominantVsBilateral, Block::DominantVsUnilateral,
                                       Block::NondominantVsUnilateral};

std::string_view to_string(Block block);
Block parse_block(std::string_view name);

/// Egocentric measures (rows) against clinical scores (columns).
struct CorrelationMatrix {
    Block block = Block::BilateralVsBilateral;
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<stats::CorrelationCell> cells;  // row-major

    const stats::CorrelationCell& at(std::size_t r, std::size_t c) const { return cells[r * cols.size() + c]; }
};

/// Row and column labels of a block.
std::vector<std::string> block_rows(Block block);
std::vector<std::string> block_cols(Block block);

/// Spearman correlation per (measure, score), joining participants on id and dropping
/// missing scores pairwise. Cells with fewer than 3 pairs are InsufficientN; cells with a
/// constant variable are Undefined.
CorrelationMatrix correlate_block(std::span<const ParticipantMeasures> measures,
                                  std::span<const ClinicalRecord> clinical, Block block,
                                  const stats::StrengthBands& bands = {});

struct DominanceRow {
    std::string measure;  // Perc, Dur, Num
    stats::Quartiles dominant;
    stats::Quartiles nondominant;
    std::optional<stats::TestResult> test;
    /// Set when the signed-rank test could not be computed.
    std::string error;
};

/// Dominant vs non-dominant hand, one signed-rank test per measure.
std::vector<DominanceRow> dominance_comparison(std::span<const ParticipantMeasures> measures);

enum class Format : std::uint8_t { Csv, JsonLines, Heatmap };
Format parse_format(std::string_view name);
std::string_view file_extension(Format format);

/// Plain table of preformatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Matrix formats, all long-form with one line per cell in row-major order:
//   csv:     block,measure,score,rho,p,n,strength,stars,status
//   jsonl:   one object per cell with the same keys
//   heatmap: row_label,col_label,rho,p,stars,strength
// Reals carry 6 significant digits; non-ok cells leave rho and p empty (null in jsonl).
std::string emit(const CorrelationMatrix& matrix, Format format);
/// Inverse of emit for the csv and jsonl formats.
CorrelationMatrix parse_matrix(std::string_view text, Format format);

/// csv or jsonl; heatmap is only defined for matrices and throws ArgumentError.
std::string emit(const Table& table, Format format);

/// Measure | dominant median (IQR) | non-dominant median (IQR) | Z | p
Table dominance_table(std::span<const DominanceRow> rows);
/// Method | median | q1 | q3 | fraction_above_0_8 | selected
Table method_summary_table(const MethodComparison& comparison);
/// participant_id followed by one F1 column per method.
Table f1_table(const MethodComparison& comparison);
Table friedman_table(const stats::PosthocReport& report, std::span<const std::string> methods);
Table posthoc_table(const stats::PosthocReport& report, std::span<const std::string> methods);

}  // namespace handuse
