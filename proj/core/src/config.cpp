// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace ntnpos {

namespace {

struct Field {
    std::function<void(Scenario&, const std::string&)> set;
    std::function<std::string(const Scenario&)> get;
    const char* doc;
};

double parse_double(const std::string& v) {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    if (pos != v.size()) throw ConfigError("trailing characters in numeric value '" + v + "'");
    return d;
}

long long parse_int(const std::string& v) {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    if (pos != v.size()) throw ConfigError("trailing characters in integer value '" + v + "'");
    return i;
}

Vec3 parse_vec3(const std::string& v) {
    std::istringstream ss(v);
    std::string part;
    std::vector<double> comps;
    while (std::getline(ss, part, ',')) comps.push_back(parse_double(part));
    if (comps.size() != 3)
        throw ConfigError("expected three comma-separated components, got '" + v + "'");
    return Vec3{comps[0], comps[1], comps[2]};
}

std::string fmt(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x) + "," + fmt(v.y) + "," + fmt(v.z); }

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto dbl = [&t](const char* key, double Scenario::*mem, const char* doc) {
            t[key] = Field{[mem](Scenario& s, const std::string& v) { s.*mem = parse_double(v); },
                           [mem](const Scenario& s) { return fmt(s.*mem); }, doc};
        };
        auto itg = [&t](const char* key, int Scenario::*mem, const char* doc) {
            t[key] = Field{
                [mem](Scenario& s, const std::string& v) {
                    s.*mem = static_cast<int>(parse_int(v));
                },
                [mem](const Scenario& s) { return std::to_string(s.*mem); }, doc};
        };
        auto u64 = [&t](const char* key, std::uint64_t Scenario::*mem, const char* doc) {
            t[key] = Field{
                [mem](Scenario& s, const std::string& v) {
                    s.*mem = static_cast<std::uint64_t>(parse_int(v));
                },
                [mem](const Scenario& s) { return std::to_string(s.*mem); }, doc};
        };
        auto vec = [&t](const char* key, Vec3 Scenario::*mem, const char* doc) {
            t[key] = Field{[mem](Scenario& s, const std::string& v) { s.*mem = parse_vec3(v); },
                           [mem](const Scenario& s) { return fmt(s.*mem); }, doc};
        };

        dbl("fc_hz", &Scenario::fc_hz, "carrier frequency [Hz]");
        itg("subcarriers", &Scenario::subcarriers, "number of subcarriers N (even)");
        dbl("subcarrier_spacing_hz", &Scenario::subcarrier_spacing_hz,
            "subcarrier spacing [Hz]");
        itg("symbols", &Scenario::symbols, "number of OFDM symbols M");
        dbl("cyclic_prefix_s", &Scenario::cyclic_prefix_s, "cyclic prefix duration [s]");
        itg("antennas", &Scenario::antennas, "BS array elements L (square number)");
        itg("beam_repeat", &Scenario::beam_repeat, "symbols sharing the fixed beam P");
        vec("bs_position", &Scenario::bs_position, "BS position x,y,z [m]");
        vec("ue_position", &Scenario::ue_position, "UE position x,y,z [m]");
        vec("ue_heading", &Scenario::ue_heading, "UE heading unit vector x,y,z");
        dbl("ue_speed_mps", &Scenario::ue_speed_mps, "UE speed [m/s]");
        dbl("sat_elevation_deg", &Scenario::sat_elevation_deg,
            "satellite elevation seen from the BS [deg]");
        dbl("sat_azimuth_deg", &Scenario::sat_azimuth_deg, "satellite azimuth [deg]");
        dbl("sat_altitude_m", &Scenario::sat_altitude_m, "satellite altitude [m]");
        dbl("sat_speed_mps", &Scenario::sat_speed_mps, "satellite orbital speed [m/s]");
        vec("orbit_direction", &Scenario::orbit_direction,
            "satellite velocity direction before tangent-plane projection");
        dbl("earth_radius_m", &Scenario::earth_radius_m, "Earth radius [m]");
        dbl("earth_rotation_mps", &Scenario::earth_rotation_mps,
            "ground-frame rotation speed [m/s]");
        vec("earth_rotation_dir", &Scenario::earth_rotation_dir,
            "ground-frame rotation direction");
        dbl("clock_offset_s", &Scenario::clock_offset_s, "initial UE clock offset [s]");
        dbl("cfo", &Scenario::cfo, "fractional carrier frequency offset eta");
        dbl("bs_power_dbm", &Scenario::bs_power_dbm, "BS transmit power [dBm]");
        dbl("sat_power_dbm", &Scenario::sat_power_dbm, "satellite transmit power [dBm]");
        dbl("noise_sigma2", &Scenario::noise_sigma2,
            "per-sample noise variance; negative derives it from sat_snr_db");
        dbl("sat_snr_db", &Scenario::sat_snr_db,
            "target satellite received SNR [dB] when noise_sigma2 < 0");
        dbl("fspl_exponent", &Scenario::fspl_exponent,
            "BS elevation-pattern exponent in the path gain");
        u64("pilot_seed", &Scenario::pilot_seed, "pilot PRNG seed");
        u64("codebook_seed", &Scenario::codebook_seed, "beam-sweep shuffle seed");
        dbl("search_el_min_deg", &Scenario::search_el_min_deg, "AoD sector: min elevation [deg]");
        dbl("search_el_max_deg", &Scenario::search_el_max_deg, "AoD sector: max elevation [deg]");
        dbl("search_az_min_deg", &Scenario::search_az_min_deg, "AoD sector: min azimuth [deg]");
        dbl("search_az_max_deg", &Scenario::search_az_max_deg, "AoD sector: max azimuth [deg]");
        return t;
    }();
    return table;
}

}  // namespace

Scenario load_scenario(std::istream& is) { return load_scenario(is, Scenario{}); }

Scenario load_scenario(std::istream& is, const Scenario& base) {
    Scenario sc = base;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" +
                              line + "'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = field_table().find(key);
        if (it == field_table().end())
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        try {
            it->second.set(sc, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ", key '" + key +
                              "': " + e.what());
        } catch (const std::exception& e) {
            throw ConfigError("line " + std::to_string(lineno) + ", key '" + key +
                              "': invalid value '" + value + "'");
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    return load_scenario(path, Scenario{});
}

Scenario load_scenario(const std::string& path, const Scenario& base) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return load_scenario(is, base);
}

std::string scenario_to_config(const Scenario& sc) {
    std::string out;
    for (const auto& [key, field] : field_table())
        out += key + " = " + field.get(sc) + "\n";
    return out;
}

std::string config_key_help() {
    std::string out;
    for (const auto& [key, field] : field_table()) out += "  " + key + ": " + field.doc + "\n";
    return out;
}

}  // namespace ntnpos
