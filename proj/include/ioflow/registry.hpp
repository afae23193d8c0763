#pragma once

#include "ioflow/types.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ioflow {

/// Ordered country table: one-based index, ISO 3166-1 alpha-3 code, name.
/// Indexes are contiguous from 1; codes are unique. The last entry may be
/// the synthetic rest-of-the-world aggregate "ROW".
class CountryRegistry {
public:
    struct Entry {
        int index = 0;  // one-based
        std::string iso3;
        std::string name;
    };

    CountryRegistry() = default;
    explicit CountryRegistry(std::vector<Entry> entries);

    Index size() const { return static_cast<Index>(entries_.size()); }
    const Entry& at(Index zero_based) const { return entries_.at(static_cast<std::size_t>(zero_based)); }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Zero-based position of an ISO3 code, or nullopt.
    std::optional<Index> find(std::string_view iso3) const;

    bool operator==(const CountryRegistry& other) const { return entries_same(other); }

private:
    bool entries_same(const CountryRegistry& other) const;

    std::vector<Entry> entries_;
    std::unordered_map<std::string, Index> by_code_;
};

/// Ordered activity-sector table: one-based index, OECD category code
/// (e.g. "C23 PET"), activity description. Lookups accept the full code or
/// the short alias before the first space ("C23").
class SectorRegistry {
public:
    struct Entry {
        int index = 0;  // one-based
        std::string code;         // e.g. "C23 PET"
        std::string short_code;   // e.g. "C23"
        std::string description;
    };

    SectorRegistry() = default;
    explicit SectorRegistry(std::vector<Entry> entries);

    Index size() const { return static_cast<Index>(entries_.size()); }
    const Entry& at(Index zero_based) const { return entries_.at(static_cast<std::size_t>(zero_based)); }
    const std::vector<Entry>& entries() const { return entries_; }

    std::optional<Index> find(std::string_view code_or_alias) const;

    bool operator==(const SectorRegistry& other) const { return entries_same(other); }

private:
    bool entries_same(const SectorRegistry& other) const;

    std::vector<Entry> entries_;
    std::unordered_map<std::string, Index> by_code_;
};

/// Parse `index,iso3,name` CSV with header.
CountryRegistry parse_country_registry(std::istream& in);

/// Parse `index,code,description` CSV with header. The short alias is
/// derived from the code.
SectorRegistry parse_sector_registry(std::istream& in);

/// Named country groups (`group,country` CSV with header), e.g. the
/// eurozone-2008 preset used for group labor shocks.
using GroupTable = std::map<std::string, std::vector<std::string>>;
GroupTable parse_groups(std::istream& in);

/// Built-in registries matching the shipped data/ files.
const CountryRegistry& default_countries();
const SectorRegistry& default_sectors();
const GroupTable& default_groups();

NodeSpace node_space(const CountryRegistry& countries, const SectorRegistry& sectors);

}  // namespace ioflow
