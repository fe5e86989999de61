#include "loopspace/io.hpp"

#include <fstream>

#include "json.hpp"

namespace loopspace {

using nlohmann::json;

std::string loop_to_json_string(const Loop& loop, int indent) {
    json j;
    if (const auto* g = std::get_if<GridLoop>(&loop)) {
        j["kind"] = "grid";
        j["dim"] = g->dim();
        j["interp"] = g->interp() == Interp::Linear ? "linear" : "cubic";
        json rows = json::array();
        for (int i = 0; i < g->size(); ++i) {
            json row = json::array();
            for (int d = 0; d < g->dim(); ++d) row.push_back(g->samples()(i, d));
            rows.push_back(std::move(row));
        }
        j["samples"] = std::move(rows);
    } else {
        const auto& f = std::get<FourierLoop>(loop);
        j["kind"] = "fourier";
        j["dim"] = f.dim();
        j["degree"] = f.degree();
        json re = json::array(), im = json::array();
        for (int d = 0; d < f.dim(); ++d) {
            json re_row = json::array(), im_row = json::array();
            for (int k = 0; k <= f.degree(); ++k) {
                re_row.push_back(f.coeffs()(k, d).real());
                im_row.push_back(f.coeffs()(k, d).imag());
            }
            re.push_back(std::move(re_row));
            im.push_back(std::move(im_row));
        }
        j["coeffs"] = {{"re", std::move(re)}, {"im", std::move(im)}};
    }
    return j.dump(indent);
}

Loop loop_from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("loop file is not valid JSON: ") + e.what());
    }
    try {
        const std::string kind = j.at("kind").get<std::string>();
        const int dim = j.at("dim").get<int>();
        if (kind == "grid") {
            const auto& rows = j.at("samples");
            Eigen::MatrixXd s(rows.size(), dim);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (static_cast<int>(rows[i].size()) != dim)
                    throw ConfigError("loop file: ragged sample row");
                for (int d = 0; d < dim; ++d) s(i, d) = rows[i][d].get<double>();
            }
            Interp interp = Interp::Linear;
            if (j.contains("interp") && j["interp"].get<std::string>() == "cubic")
                interp = Interp::CubicPeriodic;
            return GridLoop(std::move(s), interp);
        }
        if (kind == "fourier") {
            const int degree = j.at("degree").get<int>();
            const auto& re = j.at("coeffs").at("re");
            const auto& im = j.at("coeffs").at("im");
            if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim)
                throw ConfigError("loop file: coefficient rows do not match dim");
            Eigen::MatrixXcd c(degree + 1, dim);
            for (int d = 0; d < dim; ++d) {
                if (static_cast<int>(re[d].size()) != degree + 1 ||
                    static_cast<int>(im[d].size()) != degree + 1)
                    throw ConfigError("loop file: coefficient rows do not match degree");
                for (int k = 0; k <= degree; ++k)
                    c(k, d) = {re[d][k].get<double>(), im[d][k].get<double>()};
            }
            return FourierLoop(std::move(c));
        }
        throw ConfigError("loop file: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("loop file is missing fields: ") + e.what());
    } catch (const InvalidLoop& e) {
        throw ConfigError(std::string("loop file carries an invalid loop: ") + e.what());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

Loop read_loop(const std::filesystem::path& path) {
    return loop_from_json_string(read_text(path));
}

void write_loop(const std::filesystem::path& path, const Loop& loop) {
    write_text_atomic(path, loop_to_json_string(loop, 1));
}

} // namespace loopspace
