#include "ddae/json_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddae {

using nlohmann::json;

namespace {

json mat_to_json(const Mat& M) {
    json rows = json::array();
    for (int r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected a matrix (array of rows)");
    const int rows = static_cast<int>(j.size());
    if (rows == 0) return Mat(0, 0);
    if (!j[0].is_array()) throw ParseError(std::string(what) + ": expected rows to be arrays");
    const int cols = static_cast<int>(j[0].size());
    Mat M(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (!j[static_cast<std::size_t>(r)].is_array() ||
            static_cast<int>(j[static_cast<std::size_t>(r)].size()) != cols)
            throw ParseError(std::string(what) + ": ragged matrix rows");
        for (int c = 0; c < cols; ++c)
            M(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
    return M;
}

json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

DelayTermSeries series_from_json(const json& j, const char* what) {
    DelayTermSeries s;
    if (j.is_null()) return s;
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array of {delay, matrix}");
    for (const auto& t : j) {
        DelayTerm term;
        term.delay = t.at("delay").get<double>();
        term.matrix = mat_from_json(t.at("matrix"), what);
        s.push_back(std::move(term));
    }
    return s;
}

}  // namespace

std::string ddae_to_json(const DdaeSystem& sys) {
    json j;
    j["n"] = sys.n;
    j["delays"] = sys.delays;
    j["E"] = mat_to_json(sys.E);
    json As = json::array();
    for (const Mat& A : sys.A) As.push_back(mat_to_json(A));
    j["A"] = std::move(As);
    j["B"] = mat_to_json(sys.B);
    j["C"] = mat_to_json(sys.C);
    return j.dump(2);
}

DdaeSystem ddae_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    DdaeSystem sys;
    try {
        sys.n = j.at("n").get<int>();
        sys.delays = j.at("delays").get<std::vector<double>>();
        sys.E = mat_from_json(j.at("E"), "E");
        for (const auto& a : j.at("A")) sys.A.push_back(mat_from_json(a, "A"));
        sys.B = mat_from_json(j.at("B"), "B");
        sys.C = mat_from_json(j.at("C"), "C");
    } catch (const json::exception& e) {
        throw ParseError(std::string("DDAE document: ") + e.what());
    }
    return sys;
}

DdaeSystem load_ddae_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ddae_from_json(ss.str());
}

void save_ddae_json(const DdaeSystem& sys, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << ddae_to_json(sys) << "\n";
}

PlantSpec load_plant_json(const std::string& path) {
    json j = read_file(path);
    PlantSpec p;
    try {
        p.nG = j.at("nG").get<int>();
        p.nw = j.at("nw").get<int>();
        p.nu = j.at("nu").get<int>();
        p.ny = j.at("ny").get<int>();
        p.nz = j.at("nz").get<int>();
        if (j.contains("E")) p.E = mat_from_json(j["E"], "E");
        p.A = series_from_json(j.value("A", json()), "A");
        p.B1 = series_from_json(j.value("B1", json()), "B1");
        p.B2 = series_from_json(j.value("B2", json()), "B2");
        p.C1 = series_from_json(j.value("C1", json()), "C1");
        p.D11 = series_from_json(j.value("D11", json()), "D11");
        p.D12 = series_from_json(j.value("D12", json()), "D12");
        p.C2 = series_from_json(j.value("C2", json()), "C2");
        p.D21 = series_from_json(j.value("D21", json()), "D21");
        p.D22 = series_from_json(j.value("D22", json()), "D22");
    } catch (const json::exception& e) {
        throw ParseError(std::string("plant document: ") + e.what());
    }
    return p;
}

namespace {

TemplateSeries template_series_from_json(const json& terms, const json* mask, const char* what) {
    TemplateSeries s;
    if (terms.is_null()) return s;
    if (!terms.is_array()) throw ParseError(std::string(what) + ": expected an array of {delay, matrix}");
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
        const auto& t = terms[ti];
        TemplateTerm term;
        term.delay = t.at("delay").get<double>();
        term.value = mat_from_json(t.at("matrix"), what);
        term.free = Mat::Ones(term.value.rows(), term.value.cols());
        if (mask != nullptr) {
            if (!mask->is_array() || mask->size() != terms.size())
                throw ParseError(std::string(what) + ": mask must parallel the term array");
            const json& mt = (*mask)[ti];
            if (static_cast<int>(mt.size()) != term.value.rows())
                throw ParseError(std::string(what) + ": mask shape mismatch");
            for (int r = 0; r < term.value.rows(); ++r) {
                const json& mrow = mt[static_cast<std::size_t>(r)];
                if (static_cast<int>(mrow.size()) != term.value.cols())
                    throw ParseError(std::string(what) + ": mask shape mismatch");
                for (int c = 0; c < term.value.cols(); ++c) {
                    const json& me = mrow[static_cast<std::size_t>(c)];
                    if (me.is_string() && me.get<std::string>() == "free") {
                        term.free(r, c) = 1.0;
                    } else if (me.is_object() && me.contains("frozen")) {
                        term.free(r, c) = 0.0;
                        term.value(r, c) = me["frozen"].get<double>();
                    } else {
                        throw ParseError(std::string(what) + R"(: mask entries must be "free" or {"frozen": v})");
                    }
                }
            }
        }
        s.push_back(std::move(term));
    }
    return s;
}

void gather_p0(const TemplateSeries& s, std::vector<double>& p0) {
    for (const TemplateTerm& t : s)
        for (int r = 0; r < t.value.rows(); ++r)
            for (int c = 0; c < t.value.cols(); ++c)
                if (t.free(r, c) != 0.0) p0.push_back(t.value(r, c));
}

}  // namespace

ControllerTemplate load_template_json(const std::string& path) {
    json j = read_file(path);
    ControllerTemplate k;
    try {
        k.nK = j.at("nK").get<int>();
        const json mask = j.value("mask", json());
        auto channel = [&](const char* name) -> TemplateSeries {
            const json terms = j.value(name, json());
            const json* mptr = nullptr;
            json msub;
            if (!mask.is_null() && mask.contains(name)) {
                msub = mask[name];
                mptr = &msub;
            }
            return template_series_from_json(terms, mptr, name);
        };
        k.AK = channel("AK");
        k.BK = channel("BK");
        k.CK = channel("CK");
        k.DK = channel("DK");
        k.DKu = channel("DKu");
        if (j.contains("p0")) {
            std::vector<double> v = j["p0"].get<std::vector<double>>();
            k.p0 = Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
        } else {
            std::vector<double> v;
            gather_p0(k.AK, v);
            gather_p0(k.BK, v);
            gather_p0(k.CK, v);
            gather_p0(k.DK, v);
            gather_p0(k.DKu, v);
            k.p0 = Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("controller template: ") + e.what());
    }
    return k;
}

unsigned long long ddae_checksum(const DdaeSystem& sys) {
    std::ostringstream ss;
    auto emit = [&ss](const Mat& M) {
        char buf[64];
        for (int r = 0; r < M.rows(); ++r)
            for (int c = 0; c < M.cols(); ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g;", M(r, c));
                ss << buf;
            }
        ss << "|";
    };
    ss << sys.n << "|";
    for (double d : sys.delays) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g,", d);
        ss << buf;
    }
    ss << "|";
    emit(sys.E);
    for (const Mat& A : sys.A) emit(A);
    emit(sys.B);
    emit(sys.C);
    const std::string s = ss.str();
    unsigned long long h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace ddae
