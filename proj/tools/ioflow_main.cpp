#include "ioflow/ioflow.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ioflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;   // data, convergence or numeric failures
constexpr int kExitUsage = 2;     // bad invocation, missing input files

struct UsageError : Error {
    using Error::Error;
};

struct Config {
    std::vector<std::string> data;
    std::string year_spec;
    double alpha = 0.5;
    double tol = 1e-12;
    int max_iter = 1000;
    double step = 1e-5;
    std::string basis = "gpvm";
    std::vector<std::string> shocks;
    std::vector<std::string> group_shorthand;
    std::string out_dir;
    std::string format = "csv";
    bool keep_intra = false;
    bool first_iteration = false;
    bool dump_stochastic = false;
    bool no_linearity_check = false;
    int threads = 0;  // 0 = hardware concurrency
};

struct Registries {
    CountryRegistry countries;
    SectorRegistry sectors;
    GroupTable groups;
};

Registries load_registries() {
    const char* dir = std::getenv("IOFLOW_REGISTRY_DIR");
    if (dir == nullptr || *dir == '\0') {
        return {default_countries(), default_sectors(), default_groups()};
    }
    const fs::path base(dir);
    auto open = [&](const char* name, bool required) -> std::optional<std::ifstream> {
        fs::path p = base / name;
        if (!fs::exists(p)) {
            if (required) throw UsageError("registry file not found: " + p.string());
            return std::nullopt;
        }
        std::ifstream in(p);
        if (!in) throw Error("cannot open registry file: " + p.string());
        return in;
    };
    Registries reg;
    auto countries_in = open("countries.csv", true);
    reg.countries = parse_country_registry(*countries_in);
    auto sectors_in = open("sectors.csv", true);
    reg.sectors = parse_sector_registry(*sectors_in);
    if (auto groups_in = open("groups.csv", false)) {
        reg.groups = parse_groups(*groups_in);
    } else {
        reg.groups = default_groups();
    }
    return reg;
}

std::vector<int> parse_years(const std::string& spec, std::size_t min_count, std::size_t max_count) {
    std::vector<int> years;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            years.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("bad year '" + item + "'");
        }
    }
    if (years.size() < min_count || years.size() > max_count) {
        throw UsageError("expected between " + std::to_string(min_count) + " and " +
                    std::to_string(max_count) + " years, got " + std::to_string(years.size()));
    }
    return years;
}

FlowTensor load_tensor(const std::string& path, const Registries& reg, int year, bool keep_intra,
                       ParseStats* stats = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open input file: " + path);
    FlowTensor tensor = parse_flow_table(in, reg.countries, reg.sectors, year, stats);
    if (!keep_intra) tensor = zero_intra_country(std::move(tensor));
    return tensor;
}

/// Pending output files: rendered in memory first, then written atomically,
/// manifest last. Aborted runs leave nothing behind.
class OutputSet {
public:
    OutputSet(fs::path dir, std::string format) : dir_(std::move(dir)), format_(std::move(format)) {}

    void add_table(const std::string& stem, const Table& table) {
        const bool as_json = format_ == "json";
        add_raw(stem + (as_json ? ".json" : ".csv"), as_json ? table.to_json() : table.to_csv());
    }

    void add_raw(const std::string& name, std::string content) {
        files_.emplace_back(name, std::move(content));
    }

    void write_all(json manifest_body) {
        fs::create_directories(dir_);
        json outputs = json::array();
        for (const auto& [name, content] : files_) {
            write_file_atomic(dir_ / name, content);
            outputs.push_back({{"file", name}, {"fnv1a64", fnv1a64_hex(content)}});
        }
        manifest_body["outputs"] = std::move(outputs);
        write_file_atomic(dir_ / "manifest.json", manifest_body.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::string format_;
    std::vector<std::pair<std::string, std::string>> files_;
};

json config_json(const Config& c, std::initializer_list<const char*> fields) {
    json out;
    const std::set<std::string> wanted(fields.begin(), fields.end());
    auto want = [&](const char* f) { return wanted.count(f) > 0; };
    if (want("data")) out["data"] = c.data;
    if (want("year")) out["year"] = c.year_spec;
    if (want("alpha")) out["alpha"] = c.alpha;
    if (want("tol")) out["tol"] = c.tol;
    if (want("max_iter")) out["max_iter"] = c.max_iter;
    if (want("step")) out["step"] = c.step;
    if (want("basis")) out["basis"] = c.basis;
    if (want("shocks")) out["shocks"] = c.shocks;
    if (want("format")) out["format"] = c.format;
    if (want("keep_intra")) out["keep_intra"] = c.keep_intra;
    return out;
}

json solve_json(const RankResult& r) {
    return {{"iterations", r.iterations}, {"residual", r.residual}};
}

std::vector<Basis> parse_basis(const std::string& basis) {
    if (basis == "gpvm") return {Basis::Gpvm};
    if (basis == "value") return {Basis::Value};
    if (basis == "both") return {Basis::Gpvm, Basis::Value};
    throw UsageError("basis must be gpvm, value or both");
}

struct ResolvedShock {
    ShockSpec spec;
    std::string kind_label;    // sector | labor | group
    std::string target_label;  // C23, CHN, eurozone-2008, ...
};

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

std::vector<ResolvedShock> resolve_shocks(const std::vector<std::string>& specs,
                                          const Registries& reg) {
    std::vector<ResolvedShock> out;
    std::set<std::string> seen;
    auto push = [&](ResolvedShock shock) {
        const std::string key = shock.kind_label + ":" + shock.target_label;
        if (!seen.insert(key).second) throw UsageError("duplicate shock target " + key);
        out.push_back(std::move(shock));
    };

    for (const auto& spec : specs) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) {
            throw UsageError("shock spec must look like sector:<code>, labor:<iso3> or group:<name>, got '" +
                        spec + "'");
        }
        const std::string kind = spec.substr(0, colon);
        const std::string arg = spec.substr(colon + 1);
        if (kind == "sector") {
            if (arg == "all") {
                for (Index s = 0; s < reg.sectors.size(); ++s) {
                    push({ShockSpec::sector_price(s, 0.0), "sector", reg.sectors.at(s).short_code});
                }
            } else if (auto s = reg.sectors.find(arg)) {
                push({ShockSpec::sector_price(*s, 0.0), "sector", reg.sectors.at(*s).short_code});
            } else {
                throw UsageError("unknown sector '" + arg + "'");
            }
        } else if (kind == "labor") {
            if (arg == "all") {
                for (Index c = 0; c < reg.countries.size(); ++c) {
                    push({ShockSpec::country_labor(c, 0.0), "labor", reg.countries.at(c).iso3});
                }
            } else if (auto c = reg.countries.find(arg)) {
                push({ShockSpec::country_labor(*c, 0.0), "labor", reg.countries.at(*c).iso3});
            } else {
                throw UsageError("unknown country '" + arg + "'");
            }
        } else if (kind == "group") {
            std::vector<std::string> members;
            std::string label = arg;
            if (auto it = reg.groups.find(arg); it != reg.groups.end()) {
                members = it->second;
            } else if (arg.find('+') != std::string::npos) {
                members = split_on(arg, '+');
                std::string joined;
                for (const auto& m : members) {
                    if (!joined.empty()) joined += '-';
                    joined += m;
                }
                label = joined;
            } else {
                throw UsageError("unknown group '" + arg + "' (not a preset, not an ISO3+ISO3 list)");
            }
            std::vector<Index> indices;
            for (const auto& m : members) {
                if (auto c = reg.countries.find(m)) {
                    indices.push_back(*c);
                } else {
                    throw UsageError("unknown country '" + m + "' in group '" + arg + "'");
                }
            }
            push({ShockSpec::group_labor(std::move(indices), 0.0), "group", label});
        } else {
            throw UsageError("unknown shock kind '" + kind + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// ingest-check

void require_single_dataset(const Config& cfg) {
    if (cfg.data.size() != 1) throw UsageError("this command takes exactly one --data file");
}

int cmd_ingest_check(const Config& cfg, const Registries& reg) {
    require_single_dataset(cfg);
    const auto years = parse_years(cfg.year_spec, 1, 1);
    ParseStats stats;
    const FlowTensor tensor = load_tensor(cfg.data.at(0), reg, years[0], cfg.keep_intra, &stats);
    if (stats.records == 0) {
        throw Error("no records for year " + std::to_string(years[0]) + " in " + cfg.data.at(0));
    }
    const ValueTables tables = compute_values(tensor);

    const double import_total = tables.import_value.sum();
    const double export_total = tables.export_value.sum();
    const double gap = std::abs(import_total - export_total) / tables.total;
    Index zero_out = 0;
    Index zero_in = 0;
    for (Index i = 0; i < tensor.nodes.size(); ++i) {
        if (tables.export_value[i] == 0.0) ++zero_out;
        if (tables.import_value[i] == 0.0) ++zero_in;
    }

    std::cout << "year: " << tensor.year << "\n"
              << "countries: " << tensor.nodes.n_countries
              << "  sectors: " << tensor.nodes.n_sectors << "  nodes: " << tensor.nodes.size()
              << "\n"
              << "records: " << stats.records << " (skipped " << stats.skipped_other_year
              << " from other years)\n"
              << "total exchange value: " << format_sig10(tables.total / 1000.0)
              << " billion USD\n"
              << "import/export conservation gap: " << format_sig10(gap) << " (relative)\n"
              << "nodes with zero outgoing value: " << zero_out
              << "  zero incoming value: " << zero_in << "\n";

    if (!cfg.out_dir.empty()) {
        OutputSet outputs(cfg.out_dir, cfg.format);
        Table t;
        t.header = {"country_iso3", "import_busd", "export_busd"};
        const Vector imports = reduce(tables.import_value, tensor.nodes, Axis::Country);
        const Vector exports = reduce(tables.export_value, tensor.nodes, Axis::Country);
        for (Index c = 0; c < tensor.nodes.n_countries; ++c) {
            t.add_row({reg.countries.at(c).iso3, format_sig10(imports[c] / 1000.0),
                       format_sig10(exports[c] / 1000.0)});
        }
        outputs.add_table("values_countries", t);
        json manifest;
        manifest["command"] = "ingest-check";
        manifest["config"] = config_json(cfg, {"data", "year", "format", "keep_intra"});
        manifest["records"] = stats.records;
        outputs.write_all(std::move(manifest));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// rank

void append_rank_columns(std::vector<std::string>& row, const Vector& p, const Ordering& k,
                         Index i) {
    row.push_back(format_sig10(p[i]));
    row.push_back(std::to_string(k.rank_of[static_cast<std::size_t>(i)]));
}

Table node_rank_table(const GpvmResult& g, const Registries& reg, const NodeSpace& nodes) {
    Table t;
    t.header = {"node_id", "country", "sector", "P", "K", "Pstar", "Kstar", "K2"};
    for (Index i = 0; i < nodes.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(std::to_string(i + 1));
        row.push_back(reg.countries.at(nodes.country_of(i)).iso3);
        row.push_back(reg.sectors.at(nodes.sector_of(i)).code);
        append_rank_columns(row, g.pagerank.node_prob, g.pagerank.node_rank, i);
        append_rank_columns(row, g.cheirank.node_prob, g.cheirank.node_rank, i);
        row.push_back(std::to_string(g.node_k2.rank.rank_of[static_cast<std::size_t>(i)]));
        t.add_row(std::move(row));
    }
    return t;
}

Table first_iteration_table(const GpvmResult& g, const Registries& reg, const NodeSpace& nodes) {
    Table t;
    t.header = {"node_id", "country", "sector", "P", "K", "Pstar", "Kstar", "K2"};
    const TwoDRankResult k2 = two_d_rank(g.first_pagerank.node_rank, g.first_cheirank.node_rank);
    for (Index i = 0; i < nodes.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(std::to_string(i + 1));
        row.push_back(reg.countries.at(nodes.country_of(i)).iso3);
        row.push_back(reg.sectors.at(nodes.sector_of(i)).code);
        append_rank_columns(row, g.first_pagerank.node_prob, g.first_pagerank.node_rank, i);
        append_rank_columns(row, g.first_cheirank.node_prob, g.first_cheirank.node_rank, i);
        row.push_back(std::to_string(k2.rank.rank_of[static_cast<std::size_t>(i)]));
        t.add_row(std::move(row));
    }
    return t;
}

Table reduced_rank_table(const char* key_name, const std::vector<std::string>& keys,
                         const Vector& p, const Ordering& k, const Vector& p_star,
                         const Ordering& k_star, const Ordering& k2, const Vector& p_hat,
                         const Ordering& k_hat, const Vector& p_hat_star,
                         const Ordering& k_hat_star) {
    Table t;
    t.header = {key_name, "P", "K", "Pstar", "Kstar", "K2",
                "Phat", "Khat", "Phatstar", "Khatstar"};
    for (Index i = 0; i < p.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(keys[static_cast<std::size_t>(i)]);
        append_rank_columns(row, p, k, i);
        append_rank_columns(row, p_star, k_star, i);
        row.push_back(std::to_string(k2.rank_of[static_cast<std::size_t>(i)]));
        append_rank_columns(row, p_hat, k_hat, i);
        append_rank_columns(row, p_hat_star, k_hat_star, i);
        t.add_row(std::move(row));
    }
    return t;
}

Table value_rank_table(const ValueTables& tables, const ValueRanks& ranks, const Registries& reg) {
    Table t;
    t.header = {"node_id", "country", "sector", "Phat", "Khat", "Phatstar", "Khatstar"};
    const NodeSpace& nodes = tables.nodes;
    for (Index i = 0; i < nodes.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(std::to_string(i + 1));
        row.push_back(reg.countries.at(nodes.country_of(i)).iso3);
        row.push_back(reg.sectors.at(nodes.sector_of(i)).code);
        append_rank_columns(row, tables.import_prob, ranks.node_import, i);
        append_rank_columns(row, tables.export_prob, ranks.node_export, i);
        t.add_row(std::move(row));
    }
    return t;
}

std::string triplet_dump(const StochasticMatrix& s) {
    std::string out = "row,col,weight\n";
    for (Index j = 0; j < s.columns.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(s.columns, j); it; ++it) {
            out += std::to_string(it.row() + 1);
            out += ',';
            out += std::to_string(it.col() + 1);
            out += ',';
            out += format_roundtrip(it.value());
            out += '\n';
        }
    }
    return out;
}

int cmd_rank(const Config& cfg, const Registries& reg) {
    require_single_dataset(cfg);
    const auto years = parse_years(cfg.year_spec, 1, 1);
    const FlowTensor tensor = load_tensor(cfg.data.at(0), reg, years[0], cfg.keep_intra);

    const SolveOptions solve{cfg.tol, cfg.max_iter};
    const GpvmResult g = gpvm_ranks(tensor, cfg.alpha, solve);
    const ValueTables tables = compute_values(tensor);
    const ValueRanks value_ranks = value_rank_indexes(tables);

    std::vector<std::string> country_keys;
    for (Index c = 0; c < tensor.nodes.n_countries; ++c) {
        country_keys.push_back(reg.countries.at(c).iso3);
    }
    std::vector<std::string> sector_keys;
    for (Index s = 0; s < tensor.nodes.n_sectors; ++s) {
        sector_keys.push_back(reg.sectors.at(s).code);
    }

    OutputSet outputs(cfg.out_dir, cfg.format);
    outputs.add_table("rank_nodes", node_rank_table(g, reg, tensor.nodes));
    outputs.add_table(
        "rank_countries",
        reduced_rank_table("country", country_keys, g.pagerank.country_prob,
                           g.pagerank.country_rank, g.cheirank.country_prob,
                           g.cheirank.country_rank,
                           two_d_rank(g.pagerank.country_rank, g.cheirank.country_rank).rank,
                           value_ranks.country_import_prob, value_ranks.country_import,
                           value_ranks.country_export_prob, value_ranks.country_export));
    outputs.add_table(
        "rank_sectors",
        reduced_rank_table("sector", sector_keys, g.pagerank.sector_prob, g.pagerank.sector_rank,
                           g.cheirank.sector_prob, g.cheirank.sector_rank,
                           two_d_rank(g.pagerank.sector_rank, g.cheirank.sector_rank).rank,
                           value_ranks.sector_import_prob, value_ranks.sector_import,
                           value_ranks.sector_export_prob, value_ranks.sector_export));
    outputs.add_table("rank_values", value_rank_table(tables, value_ranks, reg));
    if (cfg.first_iteration) {
        outputs.add_table("rank_nodes_iter1", first_iteration_table(g, reg, tensor.nodes));
    }
    if (cfg.dump_stochastic) {
        outputs.add_raw("s_import.csv", triplet_dump(build_stochastic(tensor, Direction::Import)));
        outputs.add_raw("s_export.csv", triplet_dump(build_stochastic(tensor, Direction::Export)));
    }

    json manifest;
    manifest["command"] = "rank";
    manifest["config"] =
        config_json(cfg, {"data", "year", "alpha", "tol", "max_iter", "format", "keep_intra"});
    manifest["solves"] = {{"first_pagerank", solve_json(g.first_pagerank)},
                          {"pagerank", solve_json(g.pagerank)},
                          {"first_cheirank", solve_json(g.first_cheirank)},
                          {"cheirank", solve_json(g.cheirank)}};
    outputs.write_all(std::move(manifest));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// balance

int cmd_balance(const Config& cfg, const Registries& reg) {
    const auto years = parse_years(cfg.year_spec, 1, 2);
    if (cfg.data.size() != 1 && cfg.data.size() != years.size()) {
        throw UsageError("give one --data file, or exactly one per year");
    }
    const SolveOptions solve{cfg.tol, cfg.max_iter};

    struct YearBalances {
        BalanceVector gpvm;
        BalanceVector value;
        json solves;
    };
    std::vector<YearBalances> per_year;
    for (std::size_t k = 0; k < years.size(); ++k) {
        const std::string& path = cfg.data.size() == 1 ? cfg.data[0] : cfg.data[k];
        const FlowTensor tensor = load_tensor(path, reg, years[k], cfg.keep_intra);
        const GpvmResult g = gpvm_ranks(tensor, cfg.alpha, solve);
        const ValueTables tables = compute_values(tensor);
        YearBalances yb;
        yb.gpvm = balance(g.pagerank.country_prob, g.cheirank.country_prob, Basis::Gpvm);
        yb.value = balance(reduce(tables.import_prob, tensor.nodes, Axis::Country),
                           reduce(tables.export_prob, tensor.nodes, Axis::Country), Basis::Value);
        yb.solves = {{"pagerank", solve_json(g.pagerank)}, {"cheirank", solve_json(g.cheirank)}};
        per_year.push_back(std::move(yb));
    }

    const YearBalances& latest = per_year.back();
    std::optional<Vector> delta;
    if (per_year.size() == 2) {
        delta = balance_delta(per_year.front().gpvm, per_year.back().gpvm);
    }

    Table t;
    t.header = {"country_iso3", "B_gpvm", "B_value"};
    if (delta) t.header.push_back("delta_B_gpvm");
    for (Index c = 0; c < latest.gpvm.values.size(); ++c) {
        std::vector<std::string> row = {reg.countries.at(c).iso3,
                                        format_sig10(latest.gpvm.values[c]),
                                        format_sig10(latest.value.values[c])};
        if (delta) row.push_back(format_sig10((*delta)[c]));
        t.add_row(std::move(row));
    }

    OutputSet outputs(cfg.out_dir, cfg.format);
    outputs.add_table("balance", t);
    json manifest;
    manifest["command"] = "balance";
    manifest["config"] =
        config_json(cfg, {"data", "year", "alpha", "tol", "max_iter", "format", "keep_intra"});
    json solves = json::array();
    for (std::size_t k = 0; k < per_year.size(); ++k) {
        solves.push_back({{"year", years[k]}, {"solves", per_year[k].solves}});
    }
    manifest["years"] = std::move(solves);
    outputs.write_all(std::move(manifest));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sensitivity

int cmd_sensitivity(const Config& cfg, const Registries& reg) {
    require_single_dataset(cfg);
    const auto years = parse_years(cfg.year_spec, 1, 1);
    if (cfg.shocks.empty() && cfg.group_shorthand.empty()) {
        throw UsageError("sensitivity needs at least one --shock or --group");
    }
    std::vector<std::string> specs = cfg.shocks;
    for (const auto& g : cfg.group_shorthand) specs.push_back("group:" + g);
    const std::vector<ResolvedShock> shocks = resolve_shocks(specs, reg);
    const std::vector<Basis> bases = parse_basis(cfg.basis);

    const FlowTensor tensor = load_tensor(cfg.data.at(0), reg, years[0], cfg.keep_intra);
    const int threads = cfg.threads > 0
                            ? cfg.threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    OutputSet outputs(cfg.out_dir, cfg.format);
    json sweeps = json::array();
    for (const Basis basis : bases) {
        DerivativeOptions opts;
        opts.basis = basis;
        opts.step = cfg.step;
        opts.alpha = cfg.alpha;
        opts.solve = SolveOptions{cfg.tol, cfg.max_iter};
        opts.check_linearity = !cfg.no_linearity_check;

        std::vector<ShockSpec> targets;
        for (const auto& s : shocks) targets.push_back(s.spec);
        const std::vector<SensitivityMap> maps = run_sweep(tensor, targets, opts, threads);

        for (std::size_t k = 0; k < maps.size(); ++k) {
            const SensitivityMap& map = maps[k];
            const ResolvedShock& shock = shocks[k];
            const std::string stem = shock.kind_label + "_" + shock.target_label + "_" +
                                     to_string(basis);

            Table sweep;
            sweep.header = {"country_iso3", "dB", "basis", "shock_kind", "shock_target", "step"};
            Table map_data;
            map_data.header = {"country_iso3", "value"};
            for (Index c = 0; c < map.derivative.size(); ++c) {
                const std::string& iso3 = reg.countries.at(c).iso3;
                sweep.add_row({iso3, format_sig10(map.derivative[c]), to_string(basis),
                               shock.kind_label, shock.target_label, format_sig10(map.step)});
                map_data.add_row({iso3, format_sig10(map.derivative[c])});
            }
            outputs.add_table("sensitivity_" + stem, sweep);
            outputs.add_table("map_" + stem, map_data);

            json entry;
            entry["kind"] = shock.kind_label;
            entry["target"] = shock.target_label;
            entry["basis"] = to_string(basis);
            entry["step"] = map.step;
            if (shock.spec.kind == ShockSpec::Kind::GroupLabor) {
                json members = json::array();
                for (Index c : shock.spec.countries) members.push_back(reg.countries.at(c).iso3);
                entry["members"] = std::move(members);
                entry["group_dB"] = map.group_derivative.value_or(0.0);
            }
            if (shock.spec.kind == ShockSpec::Kind::CountryLabor) {
                entry["self_dB"] = map.derivative[shock.spec.countries.front()];
            }
            if (map.linearity_error) {
                entry["linearity_error"] = *map.linearity_error;
                entry["linearity_ok"] = map.linearity_ok;
                if (!map.linearity_ok) {
                    std::cerr << "warning: derivative for " << shock.kind_label << ":"
                              << shock.target_label << " (" << to_string(basis)
                              << ") fails the step-halving linearity check (error "
                              << format_sig10(*map.linearity_error) << ")\n";
                }
            }
            entry["max_iterations"] = map.max_iterations;
            entry["max_residual"] = map.max_residual;
            sweeps.push_back(std::move(entry));
        }
    }

    json manifest;
    manifest["command"] = "sensitivity";
    manifest["config"] = config_json(cfg, {"data", "year", "alpha", "tol", "max_iter", "step",
                                           "basis", "shocks", "format", "keep_intra"});
    manifest["sweeps"] = std::move(sweeps);
    outputs.write_all(std::move(manifest));
    return kExitOk;
}

void check_input_files(const Config& cfg) {
    if (cfg.data.empty()) throw UsageError("--data is required");
    for (const auto& path : cfg.data) {
        if (!fs::exists(path)) {
            throw UsageError("input file not found: " + path);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Country-sector flow network ranking and shock sensitivity"};
    app.require_subcommand(1);

    Config cfg;
    auto add_common = [&](CLI::App* sub, bool needs_out) {
        sub->add_option("--data", cfg.data, "flow table file (repeatable)");
        sub->add_option("--year", cfg.year_spec, "year, or year,year")->required();
        sub->add_option("--alpha", cfg.alpha, "damping factor in (0,1)");
        sub->add_option("--tol", cfg.tol, "power-iteration L1 tolerance");
        sub->add_option("--max-iter", cfg.max_iter, "power-iteration cap");
        sub->add_flag("--keep-intra", cfg.keep_intra, "keep intra-country flows");
        sub->add_option("--format", cfg.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        auto* out = sub->add_option("--out", cfg.out_dir, "output directory");
        if (needs_out) out->required();
    };

    auto* ingest = app.add_subcommand("ingest-check", "parse a flow table and report totals");
    add_common(ingest, false);

    auto* rank = app.add_subcommand("rank", "write node/country/sector rank tables");
    add_common(rank, true);
    rank->add_flag("--first-iteration", cfg.first_iteration,
                   "also write first-iteration node ranks");
    rank->add_flag("--dump-stochastic", cfg.dump_stochastic,
                   "debug dump of the transition matrices as triplets");

    auto* bal = app.add_subcommand("balance", "write per-country balance table");
    add_common(bal, true);

    auto* sens = app.add_subcommand("sensitivity", "finite-difference shock sweeps");
    add_common(sens, true);
    sens->add_option("--step", cfg.step, "finite-difference step");
    sens->add_option("--basis", cfg.basis, "gpvm, value or both")
        ->check(CLI::IsMember({"gpvm", "value", "both"}));
    sens->add_option("--shock", cfg.shocks,
                     "sector:<code|all>, labor:<iso3|all> or group:<name|A+B+...> (repeatable)");
    sens->add_option("--group", cfg.group_shorthand, "shorthand for --shock group:<arg>");
    sens->add_option("--threads", cfg.threads, "worker threads (default: hardware)");
    sens->add_flag("--no-linearity-check", cfg.no_linearity_check,
                   "skip the step/10 consistency check");

    CLI11_PARSE(app, argc, argv);

    try {
        check_input_files(cfg);
        const Registries reg = load_registries();
        if (ingest->parsed()) return cmd_ingest_check(cfg, reg);
        if (rank->parsed()) return cmd_rank(cfg, reg);
        if (bal->parsed()) return cmd_balance(cfg, reg);
        if (sens->parsed()) return cmd_sensitivity(cfg, reg);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
