#include "alp/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "alp/common.hpp"

namespace alp {

namespace {

std::vector<std::pair<std::string, std::function<std::uint64_t&(MachineConfig&)>>> fields() {
    std::vector<std::pair<std::string, std::function<std::uint64_t&(MachineConfig&)>>> f;
    auto top = [&](const char* name, std::uint64_t MachineConfig::*m) {
        f.emplace_back(name, [m](MachineConfig& c) -> std::uint64_t& { return c.*m; });
    };
    auto cache = [&](const std::string& prefix, CacheGeometry MachineConfig::*level) {
        for (auto [name, m] : {std::pair{"size_bytes", &CacheGeometry::size_bytes},
                               std::pair{"ways", &CacheGeometry::ways}, std::pair{"latency", &CacheGeometry::latency},
                               std::pair{"hit_pj", &CacheGeometry::hit_pj},
                               std::pair{"miss_pj", &CacheGeometry::miss_pj}})
            f.emplace_back(prefix + "." + name,
                           [level, m](MachineConfig& c) -> std::uint64_t& { return (c.*level).*m; });
    };
    top("issue_width", &MachineConfig::issue_width);
    top("mlp_window", &MachineConfig::mlp_window);
    top("freq_mhz", &MachineConfig::freq_mhz);
    cache("l1", &MachineConfig::l1);
    cache("l2", &MachineConfig::l2);
    cache("llc", &MachineConfig::llc);
    top("dram_latency", &MachineConfig::dram_latency);
    top("link_latency", &MachineConfig::link_latency);
    top("link_bandwidth", &MachineConfig::link_bandwidth);
    top("ndp_mem_bandwidth", &MachineConfig::ndp_mem_bandwidth);
    top("translation_latency", &MachineConfig::translation_latency);
    top("serdes_pj_per_bit", &MachineConfig::serdes_pj_per_bit);
    top("dram_pj_per_bit", &MachineConfig::dram_pj_per_bit);
    top("logic_pj_per_bit", &MachineConfig::logic_pj_per_bit);
    top("epoch_length", &MachineConfig::epoch_length);
    top("offload_level", &MachineConfig::offload_level);
    top("table_rows", &MachineConfig::table_rows);
    return f;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

void check_cache(const CacheGeometry& g, const char* name) {
    if (g.ways == 0 || g.size_bytes == 0) throw ConfigError(std::string(name) + " size and ways must be > 0");
    if (g.size_bytes % (g.ways * kLineBytes) != 0)
        throw ConfigError(std::string(name) + " size must be a multiple of ways * 64");
}

}  // namespace

void MachineConfig::validate() const {
    if (issue_width == 0) throw ConfigError("issue_width must be > 0");
    if (mlp_window == 0) throw ConfigError("mlp_window must be > 0");
    if (freq_mhz == 0) throw ConfigError("freq_mhz must be > 0");
    check_cache(l1, "l1");
    check_cache(l2, "l2");
    check_cache(llc, "llc");
    if (link_bandwidth == 0 || ndp_mem_bandwidth == 0) throw ConfigError("bandwidths must be > 0");
    if (ndp_mem_bandwidth < link_bandwidth) throw ConfigError("ndp_mem_bandwidth must be >= link_bandwidth");
    if (epoch_length == 0) throw ConfigError("epoch_length must be > 0");
    if (offload_level > 15) throw ConfigError("offload_level must be a 4-bit level");
    if (table_rows > 64) throw ConfigError("table_rows cannot exceed the 6-bit id space");
    if (!(cluster_threshold > 0.0 && cluster_threshold <= 1.0)) throw ConfigError("cluster_threshold must be in (0,1]");
}

std::uint64_t MachineConfig::ticks_per_instr() const { return (kTicksPerCycle + issue_width - 1) / issue_width; }

std::uint64_t MachineConfig::link_line_ticks() const {
    return (kLineBytes * kTicksPerCycle + link_bandwidth - 1) / link_bandwidth;
}

std::uint64_t MachineConfig::ndp_line_ticks() const {
    return (kLineBytes * kTicksPerCycle + ndp_mem_bandwidth - 1) / ndp_mem_bandwidth;
}

std::string serialize_config(const MachineConfig& c) {
    std::ostringstream os;
    MachineConfig copy = c;
    for (auto& [name, get] : fields()) os << name << " = " << get(copy) << '\n';
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, c.cluster_threshold);
    os << "cluster_threshold = " << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    return os.str();
}

MachineConfig parse_config(std::string_view text) {
    MachineConfig c;
    const auto table = fields();
    std::istringstream is{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view val = trim(line.substr(eq + 1));
        if (key == "cluster_threshold") {
            double v = 0;
            auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
            if (ec != std::errc() || p != val.data() + val.size())
                throw ConfigError("line " + std::to_string(lineno) + ": bad number '" + std::string(val) + "'");
            c.cluster_threshold = v;
            continue;
        }
        bool known = false;
        for (const auto& [name, get] : table) {
            if (name != key) continue;
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
            if (ec != std::errc() || p != val.data() + val.size() || val.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": bad integer '" + std::string(val) + "'");
            get(c) = v;
            known = true;
        }
        if (!known) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

}  // namespace alp
