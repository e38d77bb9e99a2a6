#include "shearsync/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shearsync/errors.hpp"

namespace shearsync {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_dir(const std::string& path) {
    if (path.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

std::string resolve_out_dir(const std::string& out_dir) {
    if (!out_dir.empty() && std::filesystem::path(out_dir).is_absolute()) return out_dir;
    const char* root = std::getenv("SHEARSYNC_OUT");
    if (root == nullptr || root[0] == '\0') return out_dir;
    return join_path(root, out_dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return (std::filesystem::path(dir) / name).string();
}

bool file_exists(const std::string& path) {
    std::error_code ec;
    return std::filesystem::exists(path, ec);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed on " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw IoError("write failed on " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out << ',';
        out << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw DomainError("csv row width does not match header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_g17(row[c]);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_csv_text(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out << ',';
        out << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw DomainError("csv row width does not match header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << row[c];
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ostringstream out;
    out << "t,e_re,e_im,n,intensity,arg_unwrapped\n";
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        out << format_g17(trace.t[i]) << ',' << format_g17(trace.e_re[i]) << ','
            << format_g17(trace.e_im[i]) << ',' << format_g17(trace.n[i]) << ','
            << format_g17(trace.intensity[i]) << ','
            << format_g17(trace.arg_unwrapped[i]) << '\n';
    }
    write_text_file(path, out.str());
}

namespace {

constexpr char kTraceMagic[8] = {'S', 'S', 'Y', 'N', 'T', 'R', 'C', '1'};

void append_column(std::string& buf, const std::vector<double>& col) {
    buf.append(reinterpret_cast<const char*>(col.data()), col.size() * sizeof(double));
}

std::vector<double> take_column(const std::string& buf, std::size_t& off, std::size_t n) {
    std::vector<double> col(n);
    std::memcpy(col.data(), buf.data() + off, n * sizeof(double));
    off += n * sizeof(double);
    return col;
}

}  // namespace

void write_trace_binary(const std::string& path, const Trace& trace) {
    const std::uint64_t n = trace.t.size();
    std::string buf;
    buf.reserve(sizeof(kTraceMagic) + sizeof(n) + 6 * n * sizeof(double));
    buf.append(kTraceMagic, sizeof(kTraceMagic));
    buf.append(reinterpret_cast<const char*>(&n), sizeof(n));
    append_column(buf, trace.t);
    append_column(buf, trace.e_re);
    append_column(buf, trace.e_im);
    append_column(buf, trace.n);
    append_column(buf, trace.intensity);
    append_column(buf, trace.arg_unwrapped);
    write_text_file(path, buf);
}

Trace read_trace_binary(const std::string& path) {
    const std::string buf = read_text_file(path);
    if (buf.size() < sizeof(kTraceMagic) + sizeof(std::uint64_t) ||
        std::memcmp(buf.data(), kTraceMagic, sizeof(kTraceMagic)) != 0)
        throw IoError(path + " is not a trace file");
    std::uint64_t n = 0;
    std::memcpy(&n, buf.data() + sizeof(kTraceMagic), sizeof(n));
    std::size_t off = sizeof(kTraceMagic) + sizeof(n);
    if (buf.size() != off + 6 * n * sizeof(double))
        throw IoError(path + " is truncated");
    Trace trace;
    trace.t = take_column(buf, off, n);
    trace.e_re = take_column(buf, off, n);
    trace.e_im = take_column(buf, off, n);
    trace.n = take_column(buf, off, n);
    trace.intensity = take_column(buf, off, n);
    trace.arg_unwrapped = take_column(buf, off, n);
    return trace;
}

}  // namespace shearsync
