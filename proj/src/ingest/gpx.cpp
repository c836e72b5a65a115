#include "elevinfer/gpx.hpp"

#include <expat.h>

#include <cstring>
#include <string>

#include "elevinfer/error.hpp"

namespace elev {

namespace {

struct ParseState {
    ElevationProfile profile;
    std::vector<LatLon> coords;
    int depth_trkpt = 0;       // >0 while inside a trkpt
    bool in_ele = false;
    bool point_has_ele = false;
    std::string ele_text;
    std::string error;

    void fail(const std::string& msg) {
        if (error.empty()) error = msg;
    }
};

const char* local_name(const char* qname) {
    // tolerate namespace-prefixed element names (ns:trkpt)
    const char* colon = std::strrchr(qname, ':');
    return colon ? colon + 1 : qname;
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
    auto* st = static_cast<ParseState*>(user);
    const char* tag = local_name(name);
    if (std::strcmp(tag, "trkpt") == 0) {
        if (st->depth_trkpt > 0) {
            st->fail("nested trkpt");
            return;
        }
        st->depth_trkpt = 1;
        st->point_has_ele = false;
        const char* lat = nullptr;
        const char* lon = nullptr;
        for (int i = 0; attrs[i]; i += 2) {
            if (std::strcmp(attrs[i], "lat") == 0) lat = attrs[i + 1];
            if (std::strcmp(attrs[i], "lon") == 0) lon = attrs[i + 1];
        }
        if (!lat || !lon) {
            st->fail("trkpt " + std::to_string(st->coords.size()) + " missing lat/lon attribute");
            return;
        }
        try {
            st->coords.push_back({std::stod(lat), std::stod(lon)});
        } catch (const std::exception&) {
            st->fail("trkpt " + std::to_string(st->coords.size()) + " has non-numeric lat/lon");
        }
    } else if (st->depth_trkpt > 0 && std::strcmp(tag, "ele") == 0) {
        st->in_ele = true;
        st->ele_text.clear();
    }
}

void XMLCALL on_end(void* user, const XML_Char* name) {
    auto* st = static_cast<ParseState*>(user);
    const char* tag = local_name(name);
    if (std::strcmp(tag, "ele") == 0 && st->in_ele) {
        st->in_ele = false;
        if (st->depth_trkpt > 0) {
            try {
                st->profile.values.push_back(std::stod(st->ele_text) * kMetersToFeet);
                st->point_has_ele = true;
            } catch (const std::exception&) {
                st->fail("trkpt " + std::to_string(st->coords.empty() ? 0 : st->coords.size() - 1) +
                         " has non-numeric <ele>");
            }
        }
    } else if (std::strcmp(tag, "trkpt") == 0 && st->depth_trkpt > 0) {
        st->depth_trkpt = 0;
        if (!st->point_has_ele) {
            st->fail("trkpt " + std::to_string(st->coords.empty() ? 0 : st->coords.size() - 1) +
                     " missing <ele>");
        }
    }
}

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
    auto* st = static_cast<ParseState*>(user);
    if (st->in_ele) st->ele_text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

ElevationProfile parse_gpx(std::string_view document, std::string source_id) {
    ParseState st;
    st.profile.source_id = source_id;

    XML_Parser parser = XML_ParserCreate(nullptr);
    if (!parser) throw RuntimeError("parse_gpx: could not create XML parser");
    XML_SetUserData(parser, &st);
    XML_SetElementHandler(parser, on_start, on_end);
    XML_SetCharacterDataHandler(parser, on_text);

    const auto ok = XML_Parse(parser, document.data(), static_cast<int>(document.size()), 1);
    if (ok == XML_STATUS_ERROR) {
        const std::string msg = XML_ErrorString(XML_GetErrorCode(parser));
        const auto line = XML_GetCurrentLineNumber(parser);
        XML_ParserFree(parser);
        throw DataError("parse_gpx: malformed XML in '" + source_id + "' line " +
                        std::to_string(line) + ": " + msg);
    }
    XML_ParserFree(parser);

    if (!st.error.empty()) throw DataError("parse_gpx: '" + source_id + "': " + st.error);
    if (st.coords.empty()) throw DataError("parse_gpx: '" + source_id + "': track has no points");

    st.profile.coords = std::move(st.coords);
    return st.profile;
}

}  // namespace elev
