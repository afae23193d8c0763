#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toy_support.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ioflow;

namespace {

const std::string kCli = IOFLOW_CLI_PATH;

int run_raw(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>/dev/null").c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

struct Workspace {
    fs::path root;

    explicit Workspace(const std::string& name) {
        root = fs::temp_directory_path() / name;
        fs::remove_all(root);
        fs::create_directories(root);
    }

    fs::path path(const std::string& rel) const { return root / rel; }
    std::string str(const std::string& rel) const { return (root / rel).string(); }
};

/// Toy registries on disk plus a matching flow file; commands are prefixed
/// with IOFLOW_REGISTRY_DIR.
struct ToyDataset {
    Workspace ws;
    std::string env_prefix;
    std::string flow_path;

    explicit ToyDataset(const std::string& name, unsigned seed = 2025) : ws(name) {
        const auto countries = toy::countries(4);
        const auto sectors = toy::sectors(3);
        const fs::path reg = ws.path("registry");
        fs::create_directories(reg);
        {
            std::ostringstream c;
            c << "index,iso3,name\n";
            for (const auto& e : countries.entries()) {
                c << e.index << ',' << e.iso3 << ',' << e.name << '\n';
            }
            spit(reg / "countries.csv", c.str());
            std::ostringstream s;
            s << "index,code,description\n";
            for (const auto& e : sectors.entries()) {
                s << e.index << ',' << e.code << ',' << e.description << '\n';
            }
            spit(reg / "sectors.csv", s.str());
        }
        std::mt19937 rng(seed);
        toy::TensorOptions opt;
        opt.density = 0.7;
        FlowTensor t = toy::random_tensor(rng, 4, 3, opt);
        t.year = 2009;
        spit(ws.path("flows.csv"), toy::to_flow_csv(t, countries, sectors));
        flow_path = ws.str("flows.csv");
        env_prefix = "env IOFLOW_REGISTRY_DIR=" + (reg).string() + " ";
    }

    int run_cmd(const std::string& args) { return run_raw(env_prefix + kCli + " " + args); }
};

int run_with_env(const std::string& env_prefix, const std::string& args) {
    return run_raw(env_prefix + kCli + " " + args);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) rows.push_back(split_csv(line));
    return rows;
}

}  // namespace

TEST_CASE("rank writes the four tables with pinned headers") {
    ToyDataset data("ioflow_cli_rank");
    const std::string out = data.ws.str("out");
    CHECK(run_with_env(data.env_prefix,
                       "rank --data " + data.flow_path + " --year 2009 --out " + out) == 0);

    const auto nodes = read_csv(fs::path(out) / "rank_nodes.csv");
    CHECK(nodes.at(0) == std::vector<std::string>{"node_id", "country", "sector", "P", "K",
                                                  "Pstar", "Kstar", "K2"});
    CHECK(nodes.size() == 1 + 12);

    const auto values = read_csv(fs::path(out) / "rank_values.csv");
    CHECK(values.at(0) == std::vector<std::string>{"node_id", "country", "sector", "Phat", "Khat",
                                                   "Phatstar", "Khatstar"});
    const auto countries = read_csv(fs::path(out) / "rank_countries.csv");
    CHECK(countries.at(0).at(0) == "country");
    CHECK(countries.size() == 1 + 4);
    const auto sectors = read_csv(fs::path(out) / "rank_sectors.csv");
    CHECK(sectors.size() == 1 + 3);
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
}

TEST_CASE("missing input file exits 2 and leaves no partial outputs") {
    ToyDataset data("ioflow_cli_missing");
    const std::string out = data.ws.str("out_missing");
    CHECK(run_with_env(data.env_prefix, "rank --data " + data.ws.str("nope.csv") +
                                            " --year 2009 --out " + out) == 2);
    CHECK(!fs::exists(out));
}

TEST_CASE("alpha changes only the rank-pipeline columns") {
    ToyDataset data("ioflow_cli_alpha");
    const std::string out_a = data.ws.str("out_a");
    const std::string out_b = data.ws.str("out_b");
    REQUIRE(run_with_env(data.env_prefix, "rank --data " + data.flow_path +
                                              " --year 2009 --alpha 0.5 --out " + out_a) == 0);
    REQUIRE(run_with_env(data.env_prefix, "rank --data " + data.flow_path +
                                              " --year 2009 --alpha 0.85 --out " + out_b) == 0);

    const auto a = read_csv(fs::path(out_a) / "rank_countries.csv");
    const auto b = read_csv(fs::path(out_b) / "rank_countries.csv");
    REQUIRE(a.size() == b.size());
    // country,P,K,Pstar,Kstar,K2,Phat,Khat,Phatstar,Khatstar
    bool pipeline_differs = false;
    for (std::size_t r = 1; r < a.size(); ++r) {
        CHECK(a[r][0] == b[r][0]);  // country key
        for (std::size_t col = 6; col < 10; ++col) CHECK(a[r][col] == b[r][col]);  // value side
        for (std::size_t col = 1; col < 6; ++col) pipeline_differs |= a[r][col] != b[r][col];
    }
    CHECK(pipeline_differs);
    // The value-only table is untouched by alpha.
    CHECK(slurp(fs::path(out_a) / "rank_values.csv") == slurp(fs::path(out_b) / "rank_values.csv"));
}

TEST_CASE("identical runs are byte-identical") {
    ToyDataset data("ioflow_cli_repro");
    const std::string flags = " --data " + data.flow_path + " --year 2009 ";
    for (const std::string& cmd :
         {std::string("rank"), std::string("balance"),
          std::string("sensitivity --shock sector:S1 --shock labor:BBB --basis both")}) {
        const std::string out1 = data.ws.str("repro1");
        const std::string out2 = data.ws.str("repro2");
        fs::remove_all(out1);
        fs::remove_all(out2);
        REQUIRE(run_with_env(data.env_prefix, cmd + flags + "--out " + out1) == 0);
        REQUIRE(run_with_env(data.env_prefix, cmd + flags + "--out " + out2) == 0);
        std::size_t compared = 0;
        for (const auto& entry : fs::directory_iterator(out1)) {
            const auto name = entry.path().filename();
            CHECK(slurp(entry.path()) == slurp(fs::path(out2) / name));
            ++compared;
        }
        CHECK(compared >= 2);
    }
}

TEST_CASE("balance outputs single- and two-year tables") {
    ToyDataset data("ioflow_cli_balance");
    const std::string out1 = data.ws.str("bal1");
    REQUIRE(run_with_env(data.env_prefix, "balance --data " + data.flow_path +
                                              " --year 2009 --out " + out1) == 0);
    const auto single = read_csv(fs::path(out1) / "balance.csv");
    CHECK(single.at(0) == std::vector<std::string>{"country_iso3", "B_gpvm", "B_value"});
    CHECK(single.size() == 1 + 4);

    // Same year twice: the delta column exists and is all zeros.
    const std::string out2 = data.ws.str("bal2");
    REQUIRE(run_with_env(data.env_prefix, "balance --data " + data.flow_path +
                                              " --year 2009,2009 --out " + out2) == 0);
    const auto doubled = read_csv(fs::path(out2) / "balance.csv");
    CHECK(doubled.at(0) == std::vector<std::string>{"country_iso3", "B_gpvm", "B_value",
                                                    "delta_B_gpvm"});
    for (std::size_t r = 1; r < doubled.size(); ++r) CHECK(doubled[r][3] == "0");
}

TEST_CASE("sensitivity fan-out, shapes and linearity bookkeeping") {
    ToyDataset data("ioflow_cli_sens");
    const std::string out = data.ws.str("out_sens");
    REQUIRE(run_with_env(data.env_prefix,
                         "sensitivity --data " + data.flow_path +
                             " --year 2009 --shock labor:CCC --basis both --out " + out) == 0);
    for (const std::string basis : {"gpvm", "value"}) {
        const auto sweep = read_csv(fs::path(out) / ("sensitivity_labor_CCC_" + basis + ".csv"));
        CHECK(sweep.at(0) == std::vector<std::string>{"country_iso3", "dB", "basis", "shock_kind",
                                                      "shock_target", "step"});
        CHECK(sweep.size() == 1 + 4);
        CHECK(sweep.at(1).at(2) == basis);
        CHECK(sweep.at(1).at(3) == "labor");
        CHECK(sweep.at(1).at(4) == "CCC");
        const auto map = read_csv(fs::path(out) / ("map_labor_CCC_" + basis + ".csv"));
        CHECK(map.at(0) == std::vector<std::string>{"country_iso3", "value"});
        CHECK(map.size() == 1 + 4);
    }
    const std::string manifest = slurp(fs::path(out) / "manifest.json");
    CHECK(manifest.find("\"linearity_ok\"") != std::string::npos);
    CHECK(manifest.find("\"self_dB\"") != std::string::npos);
}

TEST_CASE("sector sweep over a whole toy dataset") {
    ToyDataset data("ioflow_cli_sector_all");
    const std::string out = data.ws.str("out_all");
    REQUIRE(run_with_env(data.env_prefix,
                         "sensitivity --data " + data.flow_path +
                             " --year 2009 --shock sector:all --no-linearity-check --out " +
                             out) == 0);
    int sweeps = 0;
    for (const auto& entry : fs::directory_iterator(out)) {
        if (entry.path().filename().string().rfind("sensitivity_sector_", 0) == 0) ++sweeps;
    }
    CHECK(sweeps == 3);
}

TEST_CASE("group preset resolves against the default registries") {
    Workspace ws("ioflow_cli_group");
    // Real ISO3 codes so the shipped registries and eurozone preset apply.
    spit(ws.path("flows.csv"),
         "year,src_country,src_sector,dst_country,dst_sector,value\n"
         "2009,DEU,C23,FRA,C24,100.0\n"
         "2009,FRA,C24,DEU,C23,80.0\n"
         "2009,CHN,C23,DEU,C24,60.0\n"
         "2009,DEU,C24,CHN,C23,40.0\n"
         "2009,ITA,C01T05,CHN,C23,30.0\n"
         "2009,CHN,C24,ITA,C01T05,20.0\n");
    const std::string out = ws.str("out");
    REQUIRE(run_with_env("env -u IOFLOW_REGISTRY_DIR ",
                         "sensitivity --data " + ws.str("flows.csv") +
                             " --year 2009 --shock group:eurozone-2008 --no-linearity-check --out " +
                             out) == 0);
    const std::string manifest = slurp(fs::path(out) / "manifest.json");
    for (const std::string iso3 : {"AUT", "BEL", "CYP", "DEU", "ESP", "FIN", "FRA", "GRC", "IRL",
                                   "ITA", "LUX", "MLT", "NLD", "PRT", "SVN"}) {
        CHECK(manifest.find("\"" + iso3 + "\"") != std::string::npos);
    }
    CHECK(fs::exists(fs::path(out) / "sensitivity_group_eurozone-2008_gpvm.csv"));
    CHECK(manifest.find("\"group_dB\"") != std::string::npos);

    // Inline member lists work too, via the --group shorthand.
    const std::string out2 = ws.str("out2");
    CHECK(run_with_env("env -u IOFLOW_REGISTRY_DIR ",
                       "sensitivity --data " + ws.str("flows.csv") +
                           " --year 2009 --group DEU+FRA --no-linearity-check --out " + out2) == 0);
    CHECK(fs::exists(fs::path(out2) / "sensitivity_group_DEU-FRA_gpvm.csv"));
}

TEST_CASE("ingest-check reports and fails cleanly") {
    ToyDataset data("ioflow_cli_ingest");
    CHECK(data.run_cmd("ingest-check --data " + data.flow_path + " --year 2009") == 0);
    // No records for the requested year.
    CHECK(data.run_cmd("ingest-check --data " + data.flow_path + " --year 1999") == 1);
}

TEST_CASE("debug flags add the extra artifacts") {
    ToyDataset data("ioflow_cli_debug");
    const std::string out = data.ws.str("out_debug");
    REQUIRE(run_with_env(data.env_prefix,
                         "rank --data " + data.flow_path +
                             " --year 2009 --first-iteration --dump-stochastic --out " + out) == 0);
    const auto iter1 = read_csv(fs::path(out) / "rank_nodes_iter1.csv");
    CHECK(iter1.at(0) == std::vector<std::string>{"node_id", "country", "sector", "P", "K",
                                                  "Pstar", "Kstar", "K2"});
    CHECK(iter1.size() == 1 + 12);
    const auto triplets = read_csv(fs::path(out) / "s_import.csv");
    CHECK(triplets.at(0) == std::vector<std::string>{"row", "col", "weight"});
    CHECK(triplets.size() > 1);
    CHECK(fs::exists(fs::path(out) / "s_export.csv"));
}

TEST_CASE("manifest lists every output with its content hash") {
    ToyDataset data("ioflow_cli_manifest");
    const std::string out = data.ws.str("out_manifest");
    REQUIRE(run_with_env(data.env_prefix, "rank --data " + data.flow_path +
                                              " --year 2009 --out " + out) == 0);
    const std::string manifest = slurp(fs::path(out) / "manifest.json");
    for (const auto& entry : fs::directory_iterator(out)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue;
        CHECK(manifest.find("\"" + name + "\"") != std::string::npos);
        CHECK(manifest.find(fnv1a64_hex(slurp(entry.path()))) != std::string::npos);
    }
}

TEST_CASE("balance table equals library-level calls") {
    ToyDataset data("ioflow_cli_compose");
    const std::string out = data.ws.str("out_compose");
    REQUIRE(run_with_env(data.env_prefix, "balance --data " + data.flow_path +
                                              " --year 2009 --out " + out) == 0);

    std::ifstream in(data.flow_path);
    const auto countries = toy::countries(4);
    const auto sectors = toy::sectors(3);
    FlowTensor t = zero_intra_country(parse_flow_table(in, countries, sectors, 2009));
    const BalanceVector b_gpvm = balance_of_tensor(t, Basis::Gpvm);
    const BalanceVector b_value = balance_of_tensor(t, Basis::Value);

    const auto table = read_csv(fs::path(out) / "balance.csv");
    REQUIRE(table.size() == 1 + 4);
    for (Index c = 0; c < 4; ++c) {
        const auto& row = table[static_cast<std::size_t>(c) + 1];
        CHECK(row[0] == countries.at(c).iso3);
        CHECK(row[1] == format_sig10(b_gpvm.values[c]));
        CHECK(row[2] == format_sig10(b_value.values[c]));
    }
}

TEST_CASE("ingest-check value table is in billions") {
    ToyDataset data("ioflow_cli_values_out");
    const std::string out = data.ws.str("out_values");
    REQUIRE(data.run_cmd("ingest-check --data " + data.flow_path + " --year 2009 --out " + out) ==
            0);
    const auto table = read_csv(fs::path(out) / "values_countries.csv");
    CHECK(table.at(0) == std::vector<std::string>{"country_iso3", "import_busd", "export_busd"});
    CHECK(table.size() == 1 + 4);

    std::ifstream in(data.flow_path);
    const auto countries = toy::countries(4);
    const auto sectors = toy::sectors(3);
    FlowTensor t = zero_intra_country(parse_flow_table(in, countries, sectors, 2009));
    const ValueTables v = compute_values(t);
    const Vector imports = reduce(v.import_value, t.nodes, Axis::Country);
    CHECK(table.at(1).at(1) == format_sig10(imports[0] / 1000.0));
}

TEST_CASE("json format emits json tables") {
    ToyDataset data("ioflow_cli_json");
    const std::string out = data.ws.str("out_json");
    REQUIRE(run_with_env(data.env_prefix, "balance --data " + data.flow_path +
                                              " --year 2009 --format json --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "balance.json"));
    CHECK(!fs::exists(fs::path(out) / "balance.csv"));
    const std::string body = slurp(fs::path(out) / "balance.json");
    CHECK(body.find("\"B_gpvm\"") != std::string::npos);
}
