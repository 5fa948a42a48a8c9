#ifndef DESVR_DATASET_HPP
#define DESVR_DATASET_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "matrix.hpp"
#include "text.hpp"

namespace desvr {

using Date = std::chrono::sys_days;

/// Parses an ISO calendar date (YYYY-MM-DD). Anything else is rejected.
inline std::optional<Date> parse_iso_date(std::string_view s)
{
    s = text::trim(s);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        for (std::size_t k = pos; k < pos + len; ++k) {
            if (s[k] < '0' || s[k] > '9')
                return std::nullopt;
            v = v * 10 + (s[k] - '0');
        }
        return v;
    };
    const auto y = field(0, 4), m = field(5, 2), d = field(8, 2);
    if (!y || !m || !d)
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok())
        return std::nullopt;
    return Date{ymd};
}

inline std::string format_iso_date(Date date)
{
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

/// One trading day of OHLCV data.
struct PriceBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    double volume = 0.0;

    bool operator==(const PriceBar&) const = default;
};

/// Daily price series in ascending date order. Construct through
/// make_series() or parse_csv(), which establish the invariants.
struct RawSeries {
    std::vector<PriceBar> rows;

    std::size_t size() const { return rows.size(); }
    bool operator==(const RawSeries&) const = default;
};

/// Sorts rows by date and checks the series invariants: unique dates,
/// positive finite prices, high/low consistent with open and close, and a
/// non-negative volume. `line_numbers`, when given, maps each input row to
/// the line it came from for error messages.
inline RawSeries make_series(std::vector<PriceBar> rows, std::vector<std::size_t> line_numbers = {})
{
    if (line_numbers.empty())
        for (std::size_t i = 0; i < rows.size(); ++i)
            line_numbers.push_back(i + 1);

    auto where = [&](std::size_t i) { return "row " + std::to_string(line_numbers[i]); };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        for (double p : {r.open, r.high, r.low, r.close, r.adj_close})
            if (!std::isfinite(p) || p <= 0.0)
                throw DataError(where(i) + ": prices must be finite and positive");
        if (!std::isfinite(r.volume) || r.volume < 0.0)
            throw DataError(where(i) + ": volume must be finite and non-negative");
        if (r.high < std::max({r.open, r.close, r.low}) || r.low > std::min({r.open, r.close, r.high}))
            throw DataError(where(i) + ": high/low inconsistent with open/close");
    }

    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].date < rows[b].date; });

    RawSeries series;
    series.rows.reserve(rows.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && rows[order[k]].date == rows[order[k - 1]].date)
            throw DataError(where(order[k]) + ": duplicate date " + format_iso_date(rows[order[k]].date));
        series.rows.push_back(rows[order[k]]);
    }
    return series;
}

/// Reads a comma-separated price file with a header row. Columns are matched
/// case-insensitively; "Adj Close" and "adj_close" both name the adjusted
/// close. Extra columns are ignored. Row numbers in errors are 1-based file
/// lines (the header is line 1).
inline RawSeries parse_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!text::trim(line).empty())
            break;
    }
    if (text::trim(line).empty())
        throw DataError("empty input: no header row");

    static constexpr std::array<const char*, 7> required{"date", "open", "high", "low", "close", "adjclose", "volume"};
    std::array<std::size_t, 7> index{};
    index.fill(std::string::npos);
    const auto header = text::split(line);
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto key = text::header_key(header[c]);
        for (std::size_t k = 0; k < required.size(); ++k)
            if (key == required[k] && index[k] == std::string::npos)
                index[k] = c;
    }
    for (std::size_t k = 0; k < required.size(); ++k)
        if (index[k] == std::string::npos)
            throw DataError(std::string("missing required column '") + required[k] + "'");

    std::vector<PriceBar> rows;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        const auto fields = text::split(line);
        auto cell = [&](std::size_t k) -> std::string_view {
            if (index[k] >= fields.size())
                throw DataError("row " + std::to_string(line_no) + ": missing value for column '" + required[k] + "'");
            return fields[index[k]];
        };
        auto number = [&](std::size_t k) {
            const auto v = text::parse_double(cell(k));
            if (!v)
                throw DataError("row " + std::to_string(line_no) + ", column '" + required[k] + "': cannot parse '" +
                                std::string(cell(k)) + "' as a number");
            return *v;
        };

        PriceBar bar;
        const auto date = parse_iso_date(cell(0));
        if (!date)
            throw DataError("row " + std::to_string(line_no) + ", column 'date': expected YYYY-MM-DD, got '" +
                            std::string(cell(0)) + "'");
        bar.date = *date;
        bar.open = number(1);
        bar.high = number(2);
        bar.low = number(3);
        bar.close = number(4);
        bar.adj_close = number(5);
        bar.volume = number(6);
        rows.push_back(bar);
        lines.push_back(line_no);
    }
    if (rows.empty())
        throw DataError("no data rows after header");
    return make_series(std::move(rows), std::move(lines));
}

inline void write_price_csv(std::ostream& out, const RawSeries& series)
{
    out << "Date,Open,High,Low,Close,Adj Close,Volume\n";
    for (const auto& r : series.rows)
        out << format_iso_date(r.date) << ',' << text::format_double(r.open) << ',' << text::format_double(r.high)
            << ',' << text::format_double(r.low) << ',' << text::format_double(r.close) << ','
            << text::format_double(r.adj_close) << ',' << text::format_double(r.volume) << '\n';
}

/// Feature matrix paired with one regression target per row.
struct SupervisedSet {
    Matrix features;
    std::vector<double> targets;
    std::vector<std::string> column_names;
    std::string target_name;
    /// Date of each feature row; may be empty for sets not built from a series.
    std::vector<Date> dates;

    std::size_t size() const { return targets.size(); }
    std::size_t dims() const { return features.cols(); }

    /// Rows [first, first + count).
    SupervisedSet slice(std::size_t first, std::size_t count) const
    {
        SupervisedSet out;
        out.features = features.slice_rows(first, count);
        out.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(first),
                           targets.begin() + static_cast<std::ptrdiff_t>(first + count));
        out.column_names = column_names;
        out.target_name = target_name;
        if (!dates.empty())
            out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(first),
                             dates.begin() + static_cast<std::ptrdiff_t>(first + count));
        return out;
    }

    bool operator==(const SupervisedSet&) const = default;
};

inline const std::vector<std::string>& price_feature_names()
{
    static const std::vector<std::string> names{"open", "high", "low", "adj_close", "volume"};
    return names;
}

inline constexpr const char* next_close_name = "next_close";

/// Row t holds (open, high, low, adj_close, volume) of day t; the target is
/// the close of day t + 1.
inline SupervisedSet build_supervised(const RawSeries& series)
{
    if (series.size() < 2)
        throw InvalidArgument("build_supervised: need at least 2 rows, got " + std::to_string(series.size()));
    SupervisedSet set;
    set.column_names = price_feature_names();
    set.target_name = next_close_name;
    const std::size_t n = series.size() - 1;
    set.features = Matrix(n, 5);
    set.targets.resize(n);
    set.dates.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& r = series.rows[t];
        auto row = set.features.row(t);
        row[0] = r.open;
        row[1] = r.high;
        row[2] = r.low;
        row[3] = r.adj_close;
        row[4] = r.volume;
        set.targets[t] = series.rows[t + 1].close;
        set.dates[t] = r.date;
    }
    return set;
}

// --- min-max normalization -------------------------------------------------

/// Observed range of one column.
struct ColumnRange {
    std::string name;
    double x_min = 0.0;
    double x_max = 0.0;

    bool degenerate() const { return x_max == x_min; }
    bool operator==(const ColumnRange&) const = default;
};

/// Per-column affine map x -> x_low + (x_up - x_low)(x - x_min)/(x_max - x_min)
/// for every feature column and the target. Constant columns map to the
/// center of [x_low, x_up] and cannot be inverted.
struct NormalizationMap {
    std::vector<ColumnRange> features;
    ColumnRange target;
    double x_low = -1.0;
    double x_up = 1.0;

    static double forward(const ColumnRange& r, double x_low, double x_up, double x)
    {
        if (r.degenerate())
            return 0.5 * (x_low + x_up);
        return x_low + (x_up - x_low) * (x - r.x_min) / (r.x_max - r.x_min);
    }

    double apply(const ColumnRange& r, double x) const { return forward(r, x_low, x_up, x); }

    double invert(const ColumnRange& r, double value) const
    {
        if (r.degenerate())
            throw InvalidArgument("cannot invert normalization of constant column '" + r.name + "'");
        return r.x_min + (value - x_low) * (r.x_max - r.x_min) / (x_up - x_low);
    }

    const ColumnRange& column(std::string_view label) const
    {
        if (label == target.name)
            return target;
        for (const auto& c : features)
            if (c.name == label)
                return c;
        throw InvalidArgument("normalization map has no column '" + std::string(label) + "'");
    }

    bool operator==(const NormalizationMap&) const = default;
};

/// Half-open row-index range [begin, end).
struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end > begin ? end - begin : 0; }
};

inline NormalizationMap fit_normalizer(const SupervisedSet& set, double x_low, double x_up, RowRange fit_rows)
{
    detail::require(x_up > x_low, "fit_normalizer: x_up must exceed x_low");
    if (fit_rows.size() == 0)
        throw InvalidArgument("fit_normalizer: empty fit range");
    detail::require(fit_rows.end <= set.size(), "fit_normalizer: fit range exceeds set size");

    auto range_of = [&](std::string name, auto&& value_at) {
        ColumnRange r{std::move(name), value_at(fit_rows.begin), value_at(fit_rows.begin)};
        for (std::size_t i = fit_rows.begin; i < fit_rows.end; ++i) {
            r.x_min = std::min(r.x_min, value_at(i));
            r.x_max = std::max(r.x_max, value_at(i));
        }
        return r;
    };

    NormalizationMap map;
    map.x_low = x_low;
    map.x_up = x_up;
    for (std::size_t c = 0; c < set.dims(); ++c)
        map.features.push_back(range_of(set.column_names.at(c), [&](std::size_t i) { return set.features(i, c); }));
    map.target = range_of(set.target_name, [&](std::size_t i) { return set.targets[i]; });
    return map;
}

/// Applies the map to every feature column and the target. Values outside
/// the fitted range extrapolate linearly; nothing is clamped.
inline SupervisedSet apply_normalizer(const NormalizationMap& map, const SupervisedSet& set)
{
    if (map.features.size() != set.dims())
        throw DataError("apply_normalizer: map has " + std::to_string(map.features.size()) + " columns, set has " +
                        std::to_string(set.dims()));
    SupervisedSet out = set;
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t c = 0; c < set.dims(); ++c)
            out.features(i, c) = map.apply(map.features[c], set.features(i, c));
        out.targets[i] = map.apply(map.target, set.targets[i]);
    }
    return out;
}

inline double invert_normalizer(const NormalizationMap& map, std::string_view column, double value)
{
    return map.invert(map.column(column), value);
}

inline void to_json(nlohmann::json& j, const NormalizationMap& map)
{
    auto columns = nlohmann::json::array();
    for (const auto& c : map.features)
        columns.push_back({{"name", c.name}, {"x_min", c.x_min}, {"x_max", c.x_max}});
    j = {{"x_low", map.x_low},
         {"x_up", map.x_up},
         {"columns", columns},
         {"target", {{"name", map.target.name}, {"x_min", map.target.x_min}, {"x_max", map.target.x_max}}}};
}

inline void from_json(const nlohmann::json& j, NormalizationMap& map)
{
    auto column = [](const nlohmann::json& c) {
        return ColumnRange{c.at("name").get<std::string>(), c.at("x_min").get<double>(), c.at("x_max").get<double>()};
    };
    map.x_low = j.at("x_low").get<double>();
    map.x_up = j.at("x_up").get<double>();
    map.features.clear();
    for (const auto& c : j.at("columns"))
        map.features.push_back(column(c));
    map.target = column(j.at("target"));
    if (!(map.x_up > map.x_low))
        throw DataError("normalizer JSON: x_up must exceed x_low");
}

// --- splitting ---------------------------------------------------------------

/// Chronological split: the first train_count rows train, the next
/// test_count rows test.
struct SplitSpec {
    std::size_t train_count = 500;
    std::size_t test_count = 200;
};

inline std::pair<SupervisedSet, SupervisedSet> split(const SupervisedSet& set, SplitSpec spec)
{
    if (spec.train_count == 0)
        throw InvalidArgument("split: train_count must be positive");
    if (spec.train_count + spec.test_count > set.size())
        throw InvalidArgument("split: " + std::to_string(spec.train_count) + " + " + std::to_string(spec.test_count) +
                              " rows requested from a set of " + std::to_string(set.size()));
    return {set.slice(0, spec.train_count), set.slice(spec.train_count, spec.test_count)};
}

enum class FitScope { train_only, full };

struct NormalizeOptions {
    double x_low = -1.0;
    double x_up = 1.0;
    FitScope scope = FitScope::train_only;
};

/// Train/test pair ready for modelling, plus the map that produced it when
/// normalization was requested.
struct PreparedData {
    SupervisedSet train;
    SupervisedSet test;
    std::optional<NormalizationMap> normalizer;
};

inline PreparedData prepare(const SupervisedSet& set, SplitSpec spec, std::optional<NormalizeOptions> normalize)
{
    auto [train, test] = split(set, spec);
    if (!normalize)
        return {std::move(train), std::move(test), std::nullopt};
    const RowRange fit = normalize->scope == FitScope::train_only ? RowRange{0, spec.train_count}
                                                                   : RowRange{0, spec.train_count + spec.test_count};
    auto map = fit_normalizer(set, normalize->x_low, normalize->x_up, fit);
    return {apply_normalizer(map, train), apply_normalizer(map, test), std::move(map)};
}

// --- supervised-set files ----------------------------------------------------

inline void write_supervised_csv(std::ostream& out, const SupervisedSet& set)
{
    const bool with_dates = !set.dates.empty();
    if (with_dates)
        out << "date,";
    for (const auto& name : set.column_names)
        out << name << ',';
    out << set.target_name << '\n';
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (with_dates)
            out << format_iso_date(set.dates[i]) << ',';
        for (double v : set.features.row(i))
            out << text::format_double(v) << ',';
        out << text::format_double(set.targets[i]) << '\n';
    }
}

/// Feature rows read back from a supervised-set file. Targets are present
/// only when the file carries a target column.
struct FeatureTable {
    Matrix features;
    std::vector<std::string> column_names;
    std::optional<std::vector<double>> targets;
    std::string target_name;
    std::vector<Date> dates;
};

/// Reads the format written by write_supervised_csv. An optional leading
/// "date" column is recognized; the column named `target_name` (if present)
/// becomes the target, every other column is a feature.
inline FeatureTable read_supervised_csv(std::istream& in, std::string_view target_name = next_close_name)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw DataError("empty supervised-set file");
    ++line_no;
    const auto header = text::split(line);

    FeatureTable table;
    std::optional<std::size_t> date_col, target_col;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "date")
            date_col = c;
        else if (header[c] == target_name)
            target_col = c;
        else {
            feature_cols.push_back(c);
            table.column_names.emplace_back(header[c]);
        }
    }
    if (feature_cols.empty())
        throw DataError("supervised-set file has no feature columns");
    if (target_col) {
        table.targets.emplace();
        table.target_name = std::string(target_name);
    }

    table.features = Matrix(0, feature_cols.size());
    std::vector<double> row(feature_cols.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        const auto fields = text::split(line);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
        auto number = [&](std::size_t c) {
            const auto v = text::parse_double(fields[c]);
            if (!v)
                throw DataError("row " + std::to_string(line_no) + ", column '" + std::string(header[c]) +
                                "': cannot parse '" + std::string(fields[c]) + "'");
            return *v;
        };
        for (std::size_t k = 0; k < feature_cols.size(); ++k)
            row[k] = number(feature_cols[k]);
        table.features.append_row(row);
        if (target_col)
            table.targets->push_back(number(*target_col));
        if (date_col) {
            const auto d = parse_iso_date(fields[*date_col]);
            if (!d)
                throw DataError("row " + std::to_string(line_no) + ": bad date '" + std::string(fields[*date_col]) + "'");
            table.dates.push_back(*d);
        }
    }
    return table;
}

} // namespace desvr

#endif
