#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shearsync/integrate.hpp"

namespace shearsync {

// All numeric output goes through format_g17 so that a rerun with identical
// inputs produces byte-identical files.
std::string format_g17(double v);

// Creates the directory (and parents) if missing. Throws IoError on failure.
void ensure_dir(const std::string& path);

// Resolves an output directory against the SHEARSYNC_OUT environment variable:
// absolute paths pass through, relative paths are joined under SHEARSYNC_OUT
// when it is set and non-empty, otherwise left relative to the working
// directory.
std::string resolve_out_dir(const std::string& out_dir);

std::string join_path(const std::string& dir, const std::string& name);

bool file_exists(const std::string& path);
std::string read_text_file(const std::string& path);

// Writes text to path atomically (temp file + rename).
void write_text_file(const std::string& path, const std::string& text);

// Rows of doubles, rendered with format_g17. Header row is written verbatim.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Same, but cells are preformatted strings (for mixed numeric/text tables).
void write_csv_text(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

// Trace files: one row per recorded sample.
void write_trace_csv(const std::string& path, const Trace& trace);

// Compact binary twin of the trace CSV: 8-byte magic "SSYNTRC1", a little
// endian uint64 sample count, then the six columns back to back as raw
// doubles in the same order as the CSV.
void write_trace_binary(const std::string& path, const Trace& trace);
Trace read_trace_binary(const std::string& path);

}  // namespace shearsync
