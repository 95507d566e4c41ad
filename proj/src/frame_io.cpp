#include "parframe/frame_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace parframe::io {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_real_token(const std::string& tok, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("cannot parse '" + tok + "' as a number", line);
    }
    if (pos != tok.size()) throw ParseError("trailing characters in '" + tok + "'", line);
    return v;
}

/// "a+bi" / "a-bi" / bare "a". The split point is the last sign that is not
/// at the start and not part of an exponent.
Complex parse_complex_token(const std::string& tok, int line) {
    if (tok.empty()) throw ParseError("empty scalar", line);
    if (tok.back() != 'i') return Complex(parse_real_token(tok, line), 0.0);
    std::string body = tok.substr(0, tok.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t j = body.size(); j-- > 1;) {
        char c = body[j];
        if ((c == '+' || c == '-') && body[j - 1] != 'e' && body[j - 1] != 'E') {
            split = j;
            break;
        }
    }
    if (split == std::string::npos)
        throw ParseError("complex scalar '" + tok + "' lacks a real part", line);
    double re = parse_real_token(body.substr(0, split), line);
    std::string imag_part = body.substr(split);
    if (imag_part == "+" || imag_part == "-") imag_part += "1";
    double im = parse_real_token(imag_part, line);
    return Complex(re, im);
}

template <class Scalar>
Matrix<Scalar> read_rows(std::istream& in, Eigen::Index k, Eigen::Index n, int& line) {
    Matrix<Scalar> m(k, n);
    for (Eigen::Index r = 0; r < k; ++r) {
        std::string row_text;
        do {
            if (!std::getline(in, row_text))
                throw ParseError("unexpected end of input: expected " + std::to_string(k) +
                                     " matrix rows",
                                 line + 1);
            ++line;
            row_text = trim(row_text);
        } while (row_text.empty() || row_text[0] == '#');

        std::istringstream row(row_text);
        std::string tok;
        for (Eigen::Index c = 0; c < n; ++c) {
            if (!(row >> tok))
                throw ParseError("row has fewer than " + std::to_string(n) + " entries", line);
            if constexpr (std::is_same_v<Scalar, Complex>)
                m(r, c) = parse_complex_token(tok, line);
            else
                m(r, c) = parse_real_token(tok, line);
        }
        if (row >> tok)
            throw ParseError("row has more than " + std::to_string(n) + " entries", line);
    }
    return m;
}

}  // namespace

AnyFrame read_frame(std::istream& in) {
    int line = 0;
    std::string header;
    do {
        if (!std::getline(in, header)) throw ParseError("missing header line 'k n field'", 1);
        ++line;
        header = trim(header);
    } while (header.empty() || header[0] == '#');

    std::istringstream hs(header);
    long long k = 0, n = 0;
    std::string field;
    if (!(hs >> k >> n >> field))
        throw ParseError("header must be 'k n field', got '" + header + "'", line);
    if (k < 1 || n < k)
        throw ParseError("header requires n >= k >= 1, got k=" + std::to_string(k) +
                             " n=" + std::to_string(n),
                         line);
    if (field == "real")
        return RealFrame(read_rows<Real>(in, k, n, line));
    if (field == "complex")
        return ComplexFrame(read_rows<Complex>(in, k, n, line));
    throw ParseError("field must be 'real' or 'complex', got '" + field + "'", line);
}

AnyFrame load_frame(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_frame(in);
}

std::string format_scalar(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_scalar(const Complex& z) {
    char buf[88];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

namespace {

template <class Scalar>
void write_impl(std::ostream& out, const Frame<Scalar>& f, const char* field) {
    out << f.fiber_dim() << ' ' << f.size() << ' ' << field << '\n';
    for (Eigen::Index r = 0; r < f.fiber_dim(); ++r) {
        for (Eigen::Index c = 0; c < f.size(); ++c) {
            if (c) out << ' ';
            out << format_scalar(f.entries()(r, c));
        }
        out << '\n';
    }
}

}  // namespace

void write_frame(std::ostream& out, const RealFrame& f) { write_impl(out, f, "real"); }
void write_frame(std::ostream& out, const ComplexFrame& f) { write_impl(out, f, "complex"); }

void write_frame(std::ostream& out, const AnyFrame& f) {
    std::visit([&out](const auto& g) { write_frame(out, g); }, f);
}

void save_frame(const std::string& path, const AnyFrame& f) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_frame(out, f);
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace parframe::io
