#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace atlas {

/// One community post.
struct Submission {
    std::string id;
    std::string community;
    std::string title;
    std::string body;
    std::int64_t created_at = 0;  // seconds since epoch, UTC
    std::int64_t score = 0;       // upvotes minus downvotes, may be negative
    double upvote_ratio = 0.0;

    bool operator==(const Submission&) const = default;
};

/// Submissions of one community, ordered by (created_at, id), with score
/// percentiles computed over exactly this set. Immutable once built.
class Corpus {
public:
    Corpus() = default;

    /// Sorts, validates ids and computes percentiles. Throws DuplicateId or
    /// EmptyCorpus.
    Corpus(std::string community, std::vector<Submission> submissions);

    const std::string& community() const { return community_; }
    const std::vector<Submission>& submissions() const { return submissions_; }
    std::size_t size() const { return submissions_.size(); }
    bool empty() const { return submissions_.empty(); }

    const Submission& at(std::size_t rank) const { return submissions_.at(rank); }
    double percentile(std::size_t rank) const { return percentiles_.at(rank); }
    const std::vector<double>& percentiles() const { return percentiles_; }

    /// Percentile / rank lookup by id; throws UnscoredEvent for unknown ids.
    double percentile_of(const std::string& id) const;
    std::size_t rank_of(const std::string& id) const;
    bool contains(const std::string& id) const { return rank_.count(id) != 0; }

    bool operator==(const Corpus& other) const {
        return community_ == other.community_ && submissions_ == other.submissions_ &&
               percentiles_ == other.percentiles_;
    }

private:
    std::string community_;
    std::vector<Submission> submissions_;
    std::vector<double> percentiles_;
    std::unordered_map<std::string, std::size_t> rank_;
};

struct LoadOptions {
    /// Fraction of malformed lines above which the source is rejected.
    double max_malformed_fraction = 0.5;
};

struct LoadReport {
    std::size_t total_lines = 0;
    std::size_t malformed_lines = 0;
    std::vector<std::size_t> malformed_line_numbers;  // 1-based
};

/// Corpora keyed by community name.
using CorpusSet = std::map<std::string, Corpus>;

/// Parses Pushshift-style line-delimited submission records.
CorpusSet load_submissions(std::istream& in, const LoadOptions& options = {},
                           LoadReport* report = nullptr);

struct TimeWindow {
    std::int64_t start = INT64_MIN;
    std::int64_t end = INT64_MAX;
};

/// Keeps submissions mentioning `keyword` (case-insensitive, title or body)
/// inside the window; percentiles are recomputed on the retained slice.
Corpus filter_corpus(const Corpus& corpus, const std::string& keyword, TimeWindow window);

/// Hazen plotting positions, (mean_rank - 0.5) / n, ties share their mean
/// rank. Output order follows input order.
std::vector<double> score_percentiles(const std::vector<std::int64_t>& scores);

/// Writes submissions back out in the ingest format, one record per line, in
/// corpus order.
void write_submissions(std::ostream& out, const Corpus& corpus);

/// The text used for embedding: title, plus body when present and requested.
std::string embedding_text(const Submission& submission, bool include_body = true);

}  // namespace atlas
