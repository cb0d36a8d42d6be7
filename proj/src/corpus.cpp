#include "atlas/corpus.hpp"

#include "atlas/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace atlas {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    return first < last ? std::string(first, last) : std::string();
}

std::string lower_ascii(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Pushshift dumps carry created_utc as an integer, a float or a numeric string
// depending on the era of the archive.
std::int64_t as_integer(const json& v) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (!std::isfinite(d)) throw std::invalid_argument("non-finite number");
        return static_cast<std::int64_t>(std::floor(d));
    }
    if (v.is_string()) return std::stoll(v.get<std::string>());
    throw std::invalid_argument("not a number");
}

Submission parse_record(const std::string& line) {
    json j = json::parse(line);
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    Submission s;
    s.id = j.at("id").get<std::string>();
    s.community = j.at("subreddit").get<std::string>();
    s.title = j.at("title").get<std::string>();
    if (auto it = j.find("selftext"); it != j.end() && !it->is_null()) s.body = it->get<std::string>();
    s.created_at = as_integer(j.at("created_utc"));
    s.score = as_integer(j.at("score"));
    s.upvote_ratio = j.at("upvote_ratio").get<double>();

    if (s.id.empty()) throw std::invalid_argument("empty id");
    if (trim(s.title).empty()) throw std::invalid_argument("empty title");
    if (!(s.upvote_ratio >= 0.0 && s.upvote_ratio <= 1.0)) throw std::invalid_argument("upvote_ratio out of range");
    return s;
}

}  // namespace

std::vector<double> score_percentiles(const std::vector<std::int64_t>& scores) {
    if (scores.empty()) throw Error(ErrorKind::EmptyCorpus, "empty corpus: no scores to rank");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

    std::vector<double> out(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        // 1-based ranks i+1 .. j+1 share their mean
        double mean_rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
        double p = (mean_rank - 0.5) / static_cast<double>(n);
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = p;
        i = j + 1;
    }
    return out;
}

Corpus::Corpus(std::string community, std::vector<Submission> submissions)
    : community_(std::move(community)), submissions_(std::move(submissions)) {
    if (submissions_.empty()) throw Error(ErrorKind::EmptyCorpus, "empty corpus: community '" + community_ + "' has no submissions");
    std::sort(submissions_.begin(), submissions_.end(), [](const Submission& a, const Submission& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
    });
    rank_.reserve(submissions_.size());
    for (std::size_t i = 0; i < submissions_.size(); ++i) {
        if (!rank_.emplace(submissions_[i].id, i).second)
            throw Error(ErrorKind::DuplicateId, "duplicate id '" + submissions_[i].id + "' in community '" + community_ + "'");
    }
    std::vector<std::int64_t> scores;
    scores.reserve(submissions_.size());
    for (const auto& s : submissions_) scores.push_back(s.score);
    percentiles_ = score_percentiles(scores);
}

double Corpus::percentile_of(const std::string& id) const { return percentiles_[rank_of(id)]; }

std::size_t Corpus::rank_of(const std::string& id) const {
    auto it = rank_.find(id);
    if (it == rank_.end()) throw Error(ErrorKind::UnscoredEvent, "unscored event '" + id + "'");
    return it->second;
}

CorpusSet load_submissions(std::istream& in, const LoadOptions& options, LoadReport* report) {
    LoadReport local;
    std::map<std::string, std::vector<Submission>> groups;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++local.total_lines;
        try {
            Submission s = parse_record(line);
            groups[s.community].push_back(std::move(s));
        } catch (const std::exception&) {
            ++local.malformed_lines;
            local.malformed_line_numbers.push_back(line_no);
        }
    }
    if (report) *report = local;

    if (local.total_lines == 0) throw Error(ErrorKind::EmptyCorpus, "empty corpus: no records in source");
    double fraction = static_cast<double>(local.malformed_lines) / static_cast<double>(local.total_lines);
    if (fraction > options.max_malformed_fraction) {
        std::string msg = "corrupt source: " + std::to_string(local.malformed_lines) + " of " +
                          std::to_string(local.total_lines) + " lines malformed (first at line " +
                          std::to_string(local.malformed_line_numbers.front()) + ")";
        throw Error(ErrorKind::CorruptSource, msg);
    }
    if (groups.empty()) throw Error(ErrorKind::EmptyCorpus, "empty corpus: no valid records in source");

    CorpusSet out;
    for (auto& [community, subs] : groups) out.emplace(community, Corpus(community, std::move(subs)));
    return out;
}

Corpus filter_corpus(const Corpus& corpus, const std::string& keyword, TimeWindow window) {
    if (window.start > window.end) throw Error(ErrorKind::InvalidConfig, "time window start is after its end");
    const std::string needle = lower_ascii(keyword);
    std::vector<Submission> kept;
    for (const auto& s : corpus.submissions()) {
        if (s.created_at < window.start || s.created_at > window.end) continue;
        if (!needle.empty() && lower_ascii(s.title).find(needle) == std::string::npos &&
            lower_ascii(s.body).find(needle) == std::string::npos)
            continue;
        kept.push_back(s);
    }
    if (kept.empty())
        throw Error(ErrorKind::EmptyFilteredCorpus, "empty filtered corpus: no submission of '" + corpus.community() +
                                                        "' matches keyword '" + keyword + "' in the window");
    return Corpus(corpus.community(), std::move(kept));
}

void write_submissions(std::ostream& out, const Corpus& corpus) {
    for (const auto& s : corpus.submissions()) {
        json j = {{"id", s.id},           {"subreddit", s.community}, {"title", s.title},
                  {"selftext", s.body},    {"created_utc", s.created_at}, {"score", s.score},
                  {"upvote_ratio", s.upvote_ratio}};
        out << j.dump() << '\n';
    }
}

std::string embedding_text(const Submission& submission, bool include_body) {
    if (!include_body || trim(submission.body).empty()) return submission.title;
    return submission.title + "\n" + submission.body;
}

}  // namespace atlas
