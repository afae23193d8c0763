#include "ioflow/registry.hpp"

#include "ioflow/csv.hpp"

#include <istream>
#include <sstream>

namespace ioflow {

namespace {

// Mirrors data/countries.csv.
constexpr const char* kDefaultCountriesCsv = R"(index,iso3,name
1,AUS,Australia
2,AUT,Austria
3,BEL,Belgium
4,CAN,Canada
5,CHL,Chile
6,CZE,Czech Republic
7,DNK,Denmark
8,EST,Estonia
9,FIN,Finland
10,FRA,France
11,DEU,Germany
12,GRC,Greece
13,HUN,Hungary
14,ISL,Iceland
15,IRL,Ireland
16,ISR,Israel
17,ITA,Italy
18,JPN,Japan
19,KOR,Korea
20,LUX,Luxembourg
21,MEX,Mexico
22,NLD,Netherlands
23,NZL,New Zealand
24,NOR,Norway
25,POL,Poland
26,PRT,Portugal
27,SVK,Slovak Republic
28,SVN,Slovenia
29,ESP,Spain
30,SWE,Sweden
31,CHE,Switzerland
32,TUR,Turkey
33,GBR,United Kingdom
34,USA,United States
35,ARG,Argentina
36,BRA,Brazil
37,CHN,China
38,TWN,Chinese Taipei
39,IND,India
40,IDN,Indonesia
41,RUS,Russia
42,SGP,Singapore
43,ZAF,South Africa
44,HKG,Hong Kong
45,MYS,Malaysia
46,PHL,Phillippines
47,THA,Thailand
48,ROU,Romania
49,VNM,Vietnam
50,SAU,Saudi Arabia
51,BRN,Brunei Darussalam
52,BGR,Bulgaria
53,CYP,Cyprus
54,LVA,Latvia
55,LTU,Lithuania
56,MLT,Malta
57,KHM,Cambodia
58,ROW,Rest of the World
)";

// Mirrors data/sectors.csv.
constexpr const char* kDefaultSectorsCsv = R"(index,code,description
1,C01T05 AGR,Agriculture hunting forestry and fishing
2,C10T14 MIN,Mining and quarrying
3,C15T16 FOD,Food products beverages and tobacco
4,C17T19 TEX,Textiles wearing apparel and leather
5,C20 WOD,Wood and products of wood and cork
6,C21T22 PAP,Paper printing and publishing
7,C23 PET,Coke refined petroleum products and nuclear fuel
8,C24 CHM,Chemicals and chemical products
9,C25 RBP,Rubber and plastics products
10,C26 NMM,Other non-metallic mineral products
11,C27 MET,Basic metals
12,C28 FBM,Fabricated metal products
13,C29 MEQ,Machinery and equipment n.e.c.
14,C30 ITQ,Office accounting and computing machinery
15,C31 ELQ,Electrical machinery and apparatus n.e.c.
16,C32 CMQ,Radio television and communication equipment
17,C33 SCQ,Medical precision and optical instruments
18,C34 MTR,Motor vehicles trailers and semi-trailers
19,C35 TRQ,Other transport equipment
20,C36T37 OTM,Furniture and other manufacturing; recycling
21,C40T41 EGW,Electricity gas and water supply
22,C45 CON,Construction
23,C50T52 WRT,Wholesale and retail trade; repairs
24,C55 HTR,Hotels and restaurants
25,C60T63 TRN,Transport and storage
26,C64 PTL,Post and telecommunications
27,C65T67 FIN,Financial intermediation
28,C70 REA,Real estate activities
29,C71 RMQ,Renting of machinery and equipment
30,C72 ITS,Computer and related activities
31,C73 RDS,Research and development
32,C74 BZS,Other business activities
33,C75 GOV,Public administration and defence
34,C80 EDU,Education
35,C85 HTH,Health and social work
36,C90T93 OTS,Other community social and personal services
37,C95 PVH,Private households with employed persons
)";

// Mirrors data/groups.csv. The eurozone-2008 preset holds the 15 members of
// the monetary union as of 2008.
constexpr const char* kDefaultGroupsCsv = R"(group,country
eurozone-2008,AUT
eurozone-2008,BEL
eurozone-2008,CYP
eurozone-2008,DEU
eurozone-2008,ESP
eurozone-2008,FIN
eurozone-2008,FRA
eurozone-2008,GRC
eurozone-2008,IRL
eurozone-2008,ITA
eurozone-2008,LUX
eurozone-2008,MLT
eurozone-2008,NLD
eurozone-2008,PRT
eurozone-2008,SVN
)";

std::string short_alias(const std::string& code) {
    auto pos = code.find(' ');
    return pos == std::string::npos ? code : code.substr(0, pos);
}

void check_contiguous(int index, std::size_t position, const char* what) {
    if (index != static_cast<int>(position) + 1) {
        throw Error(std::string(what) + " registry indexes must be contiguous from 1, got " +
                    std::to_string(index) + " at position " + std::to_string(position + 1));
    }
}

}  // namespace

CountryRegistry::CountryRegistry(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        check_contiguous(entries_[i].index, i, "country");
        if (entries_[i].iso3.size() != 3) {
            throw Error("country code must be 3 letters, got '" + entries_[i].iso3 + "'");
        }
        if (!by_code_.emplace(entries_[i].iso3, static_cast<Index>(i)).second) {
            throw Error("duplicate country code '" + entries_[i].iso3 + "'");
        }
    }
}

std::optional<Index> CountryRegistry::find(std::string_view iso3) const {
    auto it = by_code_.find(std::string(iso3));
    if (it == by_code_.end()) return std::nullopt;
    return it->second;
}

bool CountryRegistry::entries_same(const CountryRegistry& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].iso3 != other.entries_[i].iso3 || entries_[i].name != other.entries_[i].name) {
            return false;
        }
    }
    return true;
}

SectorRegistry::SectorRegistry(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        auto& e = entries_[i];
        check_contiguous(e.index, i, "sector");
        if (e.code.empty()) throw Error("empty sector code");
        if (e.short_code.empty()) e.short_code = short_alias(e.code);
        if (!by_code_.emplace(e.code, static_cast<Index>(i)).second) {
            throw Error("duplicate sector code '" + e.code + "'");
        }
        if (e.short_code != e.code && !by_code_.emplace(e.short_code, static_cast<Index>(i)).second) {
            throw Error("duplicate sector alias '" + e.short_code + "'");
        }
    }
}

std::optional<Index> SectorRegistry::find(std::string_view code_or_alias) const {
    auto it = by_code_.find(std::string(code_or_alias));
    if (it == by_code_.end()) return std::nullopt;
    return it->second;
}

bool SectorRegistry::entries_same(const SectorRegistry& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].code != other.entries_[i].code) return false;
    }
    return true;
}

CountryRegistry parse_country_registry(std::istream& in) {
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty country registry");
    ++line_no;
    if (split_csv(line) != std::vector<std::string>{"index", "iso3", "name"}) {
        throw ParseError("country registry header must be 'index,iso3,name'", line_no);
    }
    std::vector<CountryRegistry::Entry> entries;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
        CountryRegistry::Entry e;
        try {
            e.index = std::stoi(fields[0]);
        } catch (const std::exception&) {
            throw ParseError("bad index '" + fields[0] + "'", line_no);
        }
        e.iso3 = fields[1];
        e.name = fields[2];
        entries.push_back(std::move(e));
    }
    return CountryRegistry(std::move(entries));
}

SectorRegistry parse_sector_registry(std::istream& in) {
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty sector registry");
    ++line_no;
    if (split_csv(line) != std::vector<std::string>{"index", "code", "description"}) {
        throw ParseError("sector registry header must be 'index,code,description'", line_no);
    }
    std::vector<SectorRegistry::Entry> entries;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
        SectorRegistry::Entry e;
        try {
            e.index = std::stoi(fields[0]);
        } catch (const std::exception&) {
            throw ParseError("bad index '" + fields[0] + "'", line_no);
        }
        e.code = fields[1];
        e.short_code = short_alias(e.code);
        e.description = fields[2];
        entries.push_back(std::move(e));
    }
    return SectorRegistry(std::move(entries));
}

GroupTable parse_groups(std::istream& in) {
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty group table");
    ++line_no;
    if (split_csv(line) != std::vector<std::string>{"group", "country"}) {
        throw ParseError("group table header must be 'group,country'", line_no);
    }
    GroupTable groups;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
        groups[fields[0]].push_back(fields[1]);
    }
    return groups;
}

const CountryRegistry& default_countries() {
    static const CountryRegistry registry = [] {
        std::istringstream in(kDefaultCountriesCsv);
        return parse_country_registry(in);
    }();
    return registry;
}

const SectorRegistry& default_sectors() {
    static const SectorRegistry registry = [] {
        std::istringstream in(kDefaultSectorsCsv);
        return parse_sector_registry(in);
    }();
    return registry;
}

const GroupTable& default_groups() {
    static const GroupTable groups = [] {
        std::istringstream in(kDefaultGroupsCsv);
        return parse_groups(in);
    }();
    return groups;
}

NodeSpace node_space(const CountryRegistry& countries, const SectorRegistry& sectors) {
    return NodeSpace{countries.size(), sectors.size()};
}

}  // namespace ioflow
