#include "smdbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace smd {

namespace {

constexpr int kSchemaVersion = 1;

long long lower_median_ll(std::vector<long long> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

double lower_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

DimsSpec DimsSpec::preset(int total_dimension) {
    DimsSpec spec;
    switch (total_dimension) {
        case 5: spec.kind = Kind::Preset5; break;
        case 10: spec.kind = Kind::Preset10; break;
        case 20: spec.kind = Kind::Preset20; break;
        default:
            throw std::invalid_argument("DimsSpec: preset total dimension must be 5, 10 or 20");
    }
    return spec;
}

DimsSpec DimsSpec::custom_dims(const Dims& dims) {
    dims.validate();
    DimsSpec spec;
    spec.kind = Kind::Custom;
    spec.custom = dims;
    return spec;
}

int DimsSpec::preset_total() const noexcept {
    switch (kind) {
        case Kind::Preset5: return 5;
        case Kind::Preset10: return 10;
        case Kind::Preset20: return 20;
        case Kind::Custom: return custom.upper() + custom.lower();
    }
    return 0;
}

Dims dims_for(ProblemId id, const DimsSpec& spec) {
    if (spec.kind == DimsSpec::Kind::Custom) return spec.custom;
    return preset_dims(id, spec.preset_total());
}

int default_population(const DimsSpec& spec) {
    switch (spec.kind) {
        case DimsSpec::Kind::Preset5: return 30;
        case DimsSpec::Kind::Preset10: return 50;
        case DimsSpec::Kind::Preset20: return 100;
        case DimsSpec::Kind::Custom: return 30;
    }
    return 30;
}

void RunSpec::validate() const {
    if (problems.empty()) {
        throw std::invalid_argument("RunSpec: at least one problem required");
    }
    if (runs < 1) {
        throw std::invalid_argument("RunSpec: runs must be >= 1");
    }
    if (jobs < 1) {
        throw std::invalid_argument("RunSpec: jobs must be >= 1");
    }
    if (!(solved_threshold > 0.0)) {
        throw std::invalid_argument("RunSpec: solved threshold must be positive");
    }
    ga.validate();
}

std::pair<double, double> accuracy(const SolveResult& result, const OptimumRecord& opt) {
    if (!result.found_any) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan};
    }
    return {std::abs(result.best.F - opt.F), std::abs(result.best.f - opt.f)};
}

namespace {

RunRecord execute_run(const ProblemInstance& inst, const RunSpec& spec, std::uint64_t seed) {
    RunRecord rec;
    rec.problem = *inst.id;
    rec.dims = inst.dims;
    rec.seed = seed;

    TraceSink sink;
    std::ofstream trace_file;
    if (!spec.trace_dir.empty()) {
        const std::filesystem::path path =
            std::filesystem::path(spec.trace_dir) /
            ("trace_" + inst.name + "_seed" + std::to_string(seed) + ".csv");
        trace_file.open(path);
        trace_file << "generation,best_F,best_f,alpha_upper,ll_fe\n";
        sink = [&trace_file](const TraceRow& row) {
            trace_file << row.generation << ',' << format_double(row.best_F) << ','
                       << format_double(row.best_f) << ',' << format_double(row.alpha_upper)
                       << ',' << row.ll_fe << '\n';
        };
    }

    const auto start = std::chrono::steady_clock::now();
    const SolveResult result = solve(inst, spec.ga, seed, sink);
    const auto end = std::chrono::steady_clock::now();

    rec.ll_fe = result.ll_fe;
    rec.ul_fe = result.ul_fe;
    rec.ll_calls = result.ll_calls;
    if (result.found_any) {
        rec.F_best = result.best.F;
        rec.f_best = result.best.f;
    } else {
        rec.F_best = std::numeric_limits<double>::quiet_NaN();
        rec.f_best = std::numeric_limits<double>::quiet_NaN();
    }
    const auto [ul_acc, ll_acc] = accuracy(result, inst.known_optimum());
    rec.ul_accuracy = ul_acc;
    rec.ll_accuracy = ll_acc;
    rec.feasible = result.feasible();
    rec.solved = rec.feasible && rec.ul_accuracy <= spec.solved_threshold;
    rec.wall_time_s = std::chrono::duration<double>(end - start).count();
    return rec;
}

}  // namespace

std::vector<RunRecord> run_suite(const RunSpec& spec) {
    spec.validate();
    if (!spec.trace_dir.empty()) {
        std::filesystem::create_directories(spec.trace_dir);
    }

    struct Task {
        const ProblemInstance* inst;
        std::uint64_t seed;
    };
    std::vector<ProblemInstance> instances;
    instances.reserve(spec.problems.size());
    for (ProblemId id : spec.problems) {
        instances.push_back(instantiate(id, dims_for(id, spec.dims)));
    }
    std::vector<Task> tasks;
    for (std::size_t pi = 0; pi < instances.size(); ++pi) {
        for (int k = 0; k < spec.runs; ++k) {
            tasks.push_back(Task{&instances[pi], spec.base_seed + static_cast<std::uint64_t>(k)});
        }
    }

    std::vector<RunRecord> records(tasks.size());
    if (spec.jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            records[i] = execute_run(*tasks[i].inst, spec, tasks[i].seed);
        }
        return records;
    }

    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(spec.jobs, static_cast<int>(tasks.size()));
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
                records[i] = execute_run(*tasks[i].inst, spec, tasks[i].seed);
            }
        }));
    }
    for (auto& fut : futures) fut.get();
    return records;
}

SummaryTable summarize(const std::vector<RunRecord>& records, double solved_threshold) {
    if (records.empty()) {
        throw std::invalid_argument("summarize: empty record set");
    }
    SummaryTable table;
    table.solved_threshold = solved_threshold;

    std::vector<ProblemId> order;
    for (const RunRecord& rec : records) {
        if (std::find(order.begin(), order.end(), rec.problem) == order.end()) {
            order.push_back(rec.problem);
        }
    }

    for (ProblemId id : order) {
        std::vector<long long> ll_fe, ul_fe, ll_calls;
        std::vector<double> ul_acc, ll_acc;
        int solved = 0;
        int feasible = 0;
        int runs = 0;
        for (const RunRecord& rec : records) {
            if (rec.problem != id) continue;
            ++runs;
            ll_fe.push_back(rec.ll_fe);
            ul_fe.push_back(rec.ul_fe);
            ll_calls.push_back(rec.ll_calls);
            ul_acc.push_back(rec.ul_accuracy);
            ll_acc.push_back(rec.ll_accuracy);
            if (rec.solved) ++solved;
            if (rec.feasible) ++feasible;
        }
        SummaryRow row;
        row.problem = id;
        row.runs = runs;
        std::sort(ll_fe.begin(), ll_fe.end());
        std::sort(ul_fe.begin(), ul_fe.end());
        row.ll_fe_best = ll_fe.front();
        row.ll_fe_median = ll_fe[(ll_fe.size() - 1) / 2];
        row.ll_fe_worst = ll_fe.back();
        row.ul_fe_best = ul_fe.front();
        row.ul_fe_median = ul_fe[(ul_fe.size() - 1) / 2];
        row.ul_fe_worst = ul_fe.back();
        row.ul_acc_median = lower_median(ul_acc);
        row.ll_acc_median = lower_median(ll_acc);
        row.ll_calls_median = lower_median_ll(ll_calls);
        row.ll_evals_per_call =
            row.ll_calls_median > 0
                ? static_cast<double>(row.ll_fe_median) / static_cast<double>(row.ll_calls_median)
                : 0.0;
        row.success_rate = static_cast<double>(solved) / static_cast<double>(runs);
        if (feasible == 0) {
            row.marker = '-';
        } else if (!(row.ul_acc_median < solved_threshold)) {
            row.marker = 'x';
        } else {
            row.marker = ' ';
        }
        table.rows.push_back(row);
    }
    return table;
}

const char* records_csv_header() {
    return "problem,p,q,r,s,seed,ll_fe,ul_fe,ll_calls,F_best,f_best,"
           "ul_accuracy,ll_accuracy,feasible,solved,wall_time_s";
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << records_csv_header() << '\n';
    for (const RunRecord& r : records) {
        os << to_string(r.problem) << ',' << r.dims.p << ',' << r.dims.q << ',' << r.dims.r
           << ',' << r.dims.s << ',' << r.seed << ',' << r.ll_fe << ',' << r.ul_fe << ','
           << r.ll_calls << ',' << format_double(r.F_best) << ',' << format_double(r.f_best)
           << ',' << format_double(r.ul_accuracy) << ',' << format_double(r.ll_accuracy)
           << ',' << (r.feasible ? 1 : 0) << ',' << (r.solved ? 1 : 0) << ','
           << format_double(r.wall_time_s) << '\n';
    }
    return os.str();
}

namespace {

nlohmann::json record_to_json(const RunRecord& r) {
    nlohmann::json j;
    j["problem"] = to_string(r.problem);
    j["dims"] = {{"p", r.dims.p}, {"q", r.dims.q}, {"r", r.dims.r}, {"s", r.dims.s}};
    j["seed"] = r.seed;
    j["ll_fe"] = r.ll_fe;
    j["ul_fe"] = r.ul_fe;
    j["ll_calls"] = r.ll_calls;
    // NaN (no evaluated individual) serialises as null.
    const auto num = [](double v) {
        return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
    };
    j["F_best"] = num(r.F_best);
    j["f_best"] = num(r.f_best);
    j["ul_accuracy"] = num(r.ul_accuracy);
    j["ll_accuracy"] = num(r.ll_accuracy);
    j["feasible"] = r.feasible;
    j["solved"] = r.solved;
    j["wall_time_s"] = r.wall_time_s;
    return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
    RunRecord r;
    const auto id = parse_problem_id(j.at("problem").get<std::string>());
    if (!id) {
        throw std::runtime_error("records: unknown problem name " +
                                 j.at("problem").get<std::string>());
    }
    r.problem = *id;
    r.dims.p = j.at("dims").at("p").get<int>();
    r.dims.q = j.at("dims").at("q").get<int>();
    r.dims.r = j.at("dims").at("r").get<int>();
    r.dims.s = j.at("dims").at("s").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ll_fe = j.at("ll_fe").get<long long>();
    r.ul_fe = j.at("ul_fe").get<long long>();
    r.ll_calls = j.at("ll_calls").get<long long>();
    const auto num = [](const nlohmann::json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    r.F_best = num(j.at("F_best"));
    r.f_best = num(j.at("f_best"));
    r.ul_accuracy = num(j.at("ul_accuracy"));
    r.ll_accuracy = num(j.at("ll_accuracy"));
    r.feasible = j.at("feasible").get<bool>();
    r.solved = j.at("solved").get<bool>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
}

}  // namespace

std::string records_to_json(const std::vector<RunRecord>& records) {
    nlohmann::json root;
    root["schema_version"] = kSchemaVersion;
    root["records"] = nlohmann::json::array();
    for (const RunRecord& r : records) {
        root["records"].push_back(record_to_json(r));
    }
    return root.dump(2);
}

std::vector<RunRecord> records_from_json(const std::string& text) {
    const nlohmann::json root = nlohmann::json::parse(text);
    if (!root.contains("schema_version") || !root.at("schema_version").is_number_integer() ||
        root.at("schema_version").get<int>() != kSchemaVersion) {
        throw std::runtime_error("records: unsupported schema version");
    }
    std::vector<RunRecord> out;
    for (const nlohmann::json& j : root.at("records")) {
        out.push_back(record_from_json(j));
    }
    return out;
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("records: empty CSV input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != records_csv_header()) {
        throw std::runtime_error("records: CSV header does not match schema");
    }
    std::vector<RunRecord> out;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 16) {
            throw std::runtime_error("records: malformed CSV row: " + line);
        }
        RunRecord r;
        const auto id = parse_problem_id(fields[0]);
        if (!id) throw std::runtime_error("records: unknown problem name " + fields[0]);
        r.problem = *id;
        r.dims.p = std::stoi(fields[1]);
        r.dims.q = std::stoi(fields[2]);
        r.dims.r = std::stoi(fields[3]);
        r.dims.s = std::stoi(fields[4]);
        r.seed = std::stoull(fields[5]);
        r.ll_fe = std::stoll(fields[6]);
        r.ul_fe = std::stoll(fields[7]);
        r.ll_calls = std::stoll(fields[8]);
        r.F_best = std::stod(fields[9]);
        r.f_best = std::stod(fields[10]);
        r.ul_accuracy = std::stod(fields[11]);
        r.ll_accuracy = std::stod(fields[12]);
        r.feasible = fields[13] == "1";
        r.solved = fields[14] == "1";
        r.wall_time_s = std::stod(fields[15]);
        out.push_back(r);
    }
    return out;
}

std::string table_to_csv(const SummaryTable& table) {
    std::ostringstream os;
    os << "problem,runs,ll_fe_best,ll_fe_median,ll_fe_worst,ul_fe_best,ul_fe_median,"
          "ul_fe_worst,ul_acc_median,ll_acc_median,ll_calls_median,ll_evals_per_call,"
          "success_rate,marker\n";
    for (const SummaryRow& row : table.rows) {
        os << to_string(row.problem) << ',' << row.runs << ',' << row.ll_fe_best << ','
           << row.ll_fe_median << ',' << row.ll_fe_worst << ',' << row.ul_fe_best << ','
           << row.ul_fe_median << ',' << row.ul_fe_worst << ','
           << format_double(row.ul_acc_median) << ',' << format_double(row.ll_acc_median)
           << ',' << row.ll_calls_median << ',' << format_double(row.ll_evals_per_call)
           << ',' << format_double(row.success_rate) << ','
           << (row.marker == ' ' ? "" : std::string(1, row.marker)) << '\n';
    }
    return os.str();
}

std::string table_to_json(const SummaryTable& table) {
    nlohmann::json root;
    root["schema_version"] = kSchemaVersion;
    root["solved_threshold"] = table.solved_threshold;
    root["rows"] = nlohmann::json::array();
    for (const SummaryRow& row : table.rows) {
        nlohmann::json j;
        j["problem"] = to_string(row.problem);
        j["runs"] = row.runs;
        j["ll_fe"] = {{"best", row.ll_fe_best}, {"median", row.ll_fe_median},
                      {"worst", row.ll_fe_worst}};
        j["ul_fe"] = {{"best", row.ul_fe_best}, {"median", row.ul_fe_median},
                      {"worst", row.ul_fe_worst}};
        j["ul_acc_median"] = row.ul_acc_median;
        j["ll_acc_median"] = row.ll_acc_median;
        j["ll_calls_median"] = row.ll_calls_median;
        j["ll_evals_per_call"] = row.ll_evals_per_call;
        j["success_rate"] = row.success_rate;
        j["marker"] = row.marker == ' ' ? "" : std::string(1, row.marker);
        root["rows"].push_back(std::move(j));
    }
    return root.dump(2);
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    os << content;
    if (!os) {
        throw std::runtime_error("write failed: " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

void export_records(const std::vector<RunRecord>& records, ExportFormat format,
                    const std::string& path) {
    write_file(path, format == ExportFormat::Csv ? records_to_csv(records)
                                                 : records_to_json(records));
}

std::vector<RunRecord> import_records(const std::string& path) {
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        return records_from_json(text);
    }
    return records_from_csv(text);
}

void export_table(const SummaryTable& table, ExportFormat format, const std::string& path) {
    write_file(path, format == ExportFormat::Csv ? table_to_csv(table)
                                                 : table_to_json(table));
}

}  // namespace smd
