#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "packcover/disc_bound.hpp"
#include "packcover/errors.hpp"
#include "packcover/periodic_packer.hpp"

namespace packcover {

inline constexpr const char* kPackingFormat = "packcover-packing/1";
inline constexpr const char* kDiscFormat = "packcover-discs/1";

namespace detail {

// 17 significant digits: doubles survive a write/read cycle bitwise.
inline void io_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    out += buf;
}

inline void io_pair(std::string& out, Point2 p) {
    out += "[";
    io_num(out, p.x);
    out += ", ";
    io_num(out, p.y);
    out += "]";
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace detail

inline std::string write_packing(const PeriodicPacking& p) {
    std::string out = "{\n  \"format\": \"";
    out += kPackingFormat;
    out += "\",\n  \"lambda\": ";
    detail::io_num(out, p.lambda);
    out += ",\n  \"n\": " + std::to_string(p.n);
    out += ",\n  \"triangle_side\": ";
    detail::io_num(out, p.triangle_side);
    out += ",\n  \"lattice\": [";
    detail::io_pair(out, p.u1);
    out += ", ";
    detail::io_pair(out, p.u2);
    out += "],\n  \"ellipses\": [";
    for (std::size_t i = 0; i < p.cell.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        const Ellipse& e = p.cell[i].ellipse;
        out += "    {\"center\": ";
        detail::io_pair(out, e.center());
        out += ", \"semi_axes\": [";
        detail::io_num(out, e.semi_major());
        out += ", ";
        detail::io_num(out, e.semi_minor());
        out += "], \"angle\": ";
        detail::io_num(out, e.angle());
        out += ", \"provenance\": \"" + detail::json_escape(p.cell[i].provenance) + "\"}";
    }
    out += "\n  ]\n}\n";
    return out;
}

inline PeriodicPacking read_packing(const std::string& text) {
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        if (j.at("format").get<std::string>() != kPackingFormat)
            throw ConfigurationError("unsupported packing format: " + j.at("format").dump());
        PeriodicPacking p;
        p.lambda = j.at("lambda").get<double>();
        p.n = j.at("n").get<int>();
        p.triangle_side = j.at("triangle_side").get<double>();
        const auto& lat = j.at("lattice");
        if (lat.size() != 2) throw ConfigurationError("lattice must hold two basis vectors");
        p.u1 = {lat.at(0).at(0).get<double>(), lat.at(0).at(1).get<double>()};
        p.u2 = {lat.at(1).at(0).get<double>(), lat.at(1).at(1).get<double>()};
        for (const auto& je : j.at("ellipses")) {
            const auto& c = je.at("center");
            const auto& ax = je.at("semi_axes");
            p.cell.push_back(PlacedEllipse{
                Ellipse::from_canonical({c.at(0).get<double>(), c.at(1).get<double>()},
                                        ax.at(0).get<double>(), ax.at(1).get<double>(),
                                        je.at("angle").get<double>()),
                je.at("provenance").get<std::string>()});
        }
        return p;
    } catch (const ConfigurationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigurationError(std::string("packing parse: ") + e.what());
    }
}

inline std::string write_discs(const DiscPacking& p) {
    std::string out = "{\n  \"format\": \"";
    out += kDiscFormat;
    out += "\",\n  \"eps\": ";
    detail::io_num(out, p.eps);
    out += ",\n  \"discs\": [";
    for (std::size_t i = 0; i < p.discs.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"c\": ";
        detail::io_pair(out, p.discs[i].center);
        out += ", \"r\": ";
        detail::io_num(out, p.discs[i].radius);
        out += "}";
    }
    out += "\n  ]\n}\n";
    return out;
}

inline DiscPacking read_discs(const std::string& text) {
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        if (j.at("format").get<std::string>() != kDiscFormat)
            throw ConfigurationError("unsupported disc format: " + j.at("format").dump());
        DiscPacking p;
        p.eps = j.at("eps").get<double>();
        for (const auto& jd : j.at("discs")) {
            const auto& c = jd.at("c");
            p.discs.push_back(
                Disc{{c.at(0).get<double>(), c.at(1).get<double>()}, jd.at("r").get<double>()});
        }
        return p;
    } catch (const ConfigurationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigurationError(std::string("disc packing parse: ") + e.what());
    }
}

inline std::string read_text_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigurationError("cannot open file: " + path);
    std::string out;
    char buf[65536];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, got);
    std::fclose(f);
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ConfigurationError("cannot open file for writing: " + path);
    const std::size_t put = std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
    if (put != text.size()) throw ConfigurationError("short write: " + path);
}

}  // namespace packcover
