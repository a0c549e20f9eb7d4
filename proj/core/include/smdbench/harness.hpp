#ifndef SMDBENCH_HARNESS_HPP
#define SMDBENCH_HARNESS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "smdbench/solver.hpp"
#include "smdbench/suite.hpp"

namespace smd {

/// Dimension selection for a campaign: one of the paper presets (total
/// dimension 5, 10 or 20 with the per-problem partitions they imply) or an
/// explicit partition.
struct DimsSpec {
    enum class Kind { Preset5, Preset10, Preset20, Custom };
    Kind kind = Kind::Preset5;
    Dims custom;

    static DimsSpec preset(int total_dimension);
    static DimsSpec custom_dims(const Dims& dims);
    bool is_preset() const noexcept { return kind != Kind::Custom; }
    int preset_total() const noexcept;
};

Dims dims_for(ProblemId id, const DimsSpec& spec);
/// 30 / 50 / 100 for the presets; 30 for custom partitions.
int default_population(const DimsSpec& spec);

/// A reproducible campaign: problems x runs with seeds base_seed + run index.
struct RunSpec {
    std::vector<ProblemId> problems;
    DimsSpec dims;
    int runs = 11;
    std::uint64_t base_seed = 1;
    GAConfig ga;
    double solved_threshold = 0.1;
    int jobs = 1;            ///< concurrent runs; records stay ordered by (problem, seed)
    std::string trace_dir;   ///< per-run convergence CSVs when non-empty

    void validate() const;
};

/// One solver run, fully identified by (problem, dims, seed).
struct RunRecord {
    ProblemId problem = ProblemId::SMD1;
    Dims dims;
    std::uint64_t seed = 0;
    long long ll_fe = 0;
    long long ul_fe = 0;
    long long ll_calls = 0;
    double F_best = 0.0;
    double f_best = 0.0;
    double ul_accuracy = 0.0;
    double ll_accuracy = 0.0;
    bool feasible = false;
    bool solved = false;
    double wall_time_s = 0.0;
};

/// Executes the campaign. Per-run solver failures are recorded as infeasible
/// rows; the campaign itself never aborts.
std::vector<RunRecord> run_suite(const RunSpec& spec);

/// Absolute objective gaps |F_best − F*| and |f_best − f*|.
std::pair<double, double> accuracy(const SolveResult& result, const OptimumRecord& opt);

/// Aggregate row in the style of the benchmark tables: best/median/worst
/// function evaluations, median accuracies and the evals-per-call ratio.
/// marker is '-' when no run found a feasible solution, 'x' when the median
/// upper gap is >= the solved threshold, ' ' otherwise.
struct SummaryRow {
    ProblemId problem = ProblemId::SMD1;
    int runs = 0;
    long long ll_fe_best = 0, ll_fe_median = 0, ll_fe_worst = 0;
    long long ul_fe_best = 0, ul_fe_median = 0, ul_fe_worst = 0;
    double ul_acc_median = 0.0;
    double ll_acc_median = 0.0;
    long long ll_calls_median = 0;
    double ll_evals_per_call = 0.0;  ///< median ll_fe / median ll_calls
    double success_rate = 0.0;
    char marker = ' ';
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
    double solved_threshold = 0.1;
};

/// Medians use the lower-median convention for even sample counts.
SummaryTable summarize(const std::vector<RunRecord>& records,
                       double solved_threshold = 0.1);

enum class ExportFormat { Csv, Json };

/// Fixed, documented record column order shared by CSV export and import.
const char* records_csv_header();

std::string records_to_csv(const std::vector<RunRecord>& records);
std::string records_to_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& text);
std::vector<RunRecord> records_from_json(const std::string& text);

std::string table_to_csv(const SummaryTable& table);
std::string table_to_json(const SummaryTable& table);

/// Lossless record round trip (import ∘ export = identity on all fields).
/// Unknown schema versions raise std::runtime_error without partial loads.
void export_records(const std::vector<RunRecord>& records, ExportFormat format,
                    const std::string& path);
std::vector<RunRecord> import_records(const std::string& path);
void export_table(const SummaryTable& table, ExportFormat format,
                  const std::string& path);

}  // namespace smd

#endif  // SMDBENCH_HARNESS_HPP
