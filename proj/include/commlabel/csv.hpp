#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace commlabel::csv {

using Record = std::vector<std::string>;

/// Parses RFC-4180 text: quoted fields, doubled quotes, CRLF or LF line
/// endings, embedded newlines inside quotes. Blank lines are skipped.
/// Throws DataError on an unterminated quote.
std::vector<Record> parse(std::string_view text);

/// Quotes a field when it contains a delimiter, quote, or line break.
std::string escape(std::string_view field);

/// Joins fields with commas, escaping as needed, without a line terminator.
std::string format_record(const Record& fields);

}  // namespace commlabel::csv
