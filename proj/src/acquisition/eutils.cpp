#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#include "acquisition/acquisition.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace chronokg {

using nlohmann::json;

namespace {

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void real_sleep(double s) {
  if (s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(s));
}

// Splits "https://host:port/path?q" into ("https://host:port", "/path?q").
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::kDomain, "bad url " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string url_encode(const std::string& s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

HttpGetFn default_http_get(double timeout_s) {
  return [timeout_s](const std::string& url) {
    auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    auto secs = static_cast<time_t>(timeout_s);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) {
      HttpResponse r;
      r.status = 0;
      r.body = httplib::to_string(res.error());
      return r;
    }
    HttpResponse r;
    r.status = res->status;
    r.body = res->body;
    for (const auto& [k, v] : res->headers) r.headers[k] = v;
    return r;
  };
}

TokenBucket::TokenBucket(double rate_per_s, Clock clock, Sleep sleep)
    : rate_(rate_per_s),
      capacity_(std::max(1.0, rate_per_s)),
      tokens_(std::max(1.0, rate_per_s)),
      clock_(clock ? std::move(clock) : Clock(steady_seconds)),
      sleep_(sleep ? std::move(sleep) : Sleep(real_sleep)) {
  if (rate_ <= 0) fail(ErrorKind::kConfig, "rate limit must be positive");
  last_ = clock_();
}

void TokenBucket::acquire() {
  std::lock_guard lock(mu_);
  for (;;) {
    double now = clock_();
    tokens_ = std::min(capacity_, tokens_ + (now - last_) * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    sleep_((1.0 - tokens_) / rate_);
  }
}

RetryingClient::RetryingClient(HttpGetFn get, std::shared_ptr<TokenBucket> bucket,
                               int max_retries, double backoff_initial_s, double backoff_max_s,
                               TokenBucket::Sleep sleep)
    : get_(std::move(get)),
      bucket_(std::move(bucket)),
      max_retries_(max_retries),
      backoff_initial_(backoff_initial_s),
      backoff_max_(backoff_max_s),
      sleep_(sleep ? std::move(sleep) : TokenBucket::Sleep(real_sleep)) {}

HttpResponse RetryingClient::get(const std::string& url) {
  int attempts = 0;
  int last_status = 0;
  double delay = backoff_initial_;
  for (;;) {
    if (bucket_) bucket_->acquire();
    ++attempts;
    ++requests_;
    HttpResponse r = get_(url);
    last_status = r.status;
    bool retryable = r.status == 0 || r.status == 429 || r.status >= 500;
    if (!retryable) {
      if (r.status >= 400)
        throw TransportError("HTTP " + std::to_string(r.status) + " for " + url, attempts,
                             r.status);
      return r;
    }
    if (attempts > max_retries_) {
      throw TransportError("giving up after " + std::to_string(attempts) + " attempts (last status " +
                               std::to_string(last_status) + ") for " + url,
                           attempts, last_status);
    }
    double wait = delay;
    if (auto it = r.headers.find("Retry-After"); it != r.headers.end()) {
      if (auto v = text::parse_double(it->second)) wait = std::max(wait, *v);
    }
    sleep_(std::min(wait, backoff_max_));
    delay = std::min(delay * 2, backoff_max_);
  }
}

// ---------------------------------------------------------------------------

EutilsDocumentSource::EutilsDocumentSource(const EutilsSettings& settings, HttpGetFn get,
                                           TokenBucket::Sleep sleep)
    : settings_(settings),
      api_key_([&] {
        const char* k = std::getenv(settings.api_key_env.c_str());
        return k ? std::string(k) : std::string();
      }()),
      client_(get ? std::move(get) : default_http_get(),
              std::make_shared<TokenBucket>(api_key_.empty() ? settings.requests_per_second
                                                             : settings.requests_per_second_with_key,
                                            TokenBucket::Clock{}, sleep),
              settings.max_retries, settings.backoff_initial_s, settings.backoff_max_s, sleep) {}

std::string EutilsDocumentSource::with_key(std::string url) const {
  if (!api_key_.empty()) url += "&api_key=" + url_encode(api_key_);
  return url;
}

std::vector<std::string> EutilsDocumentSource::search(const std::string& query) {
  auto r = client_.get(with_key(settings_.base_url +
                                "/entrez/eutils/esearch.fcgi?db=pubmed&retmode=json&retmax=10000&term=" +
                                url_encode(query)));
  try {
    auto j = json::parse(r.body);
    auto ids = j.at("esearchresult").at("idlist").get<std::vector<std::string>>();
    std::sort(ids.begin(), ids.end(), pmid_less);
    return ids;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("esearch response: ") + e.what());
  }
}

long EutilsDocumentSource::count(const std::string& query) {
  auto r = client_.get(with_key(settings_.base_url +
                                "/entrez/eutils/esearch.fcgi?db=pubmed&retmode=json&rettype=count&term=" +
                                url_encode(query)));
  try {
    auto j = json::parse(r.body);
    return std::stol(j.at("esearchresult").at("count").get<std::string>());
  } catch (const std::exception& e) {
    fail(ErrorKind::kParse, std::string("esearch count response: ") + e.what());
  }
}

std::vector<SourceDocument> EutilsDocumentSource::fetch(const std::vector<std::string>& pmids) {
  if (pmids.empty()) return {};
  auto r = client_.get(with_key(settings_.base_url +
                                "/entrez/eutils/efetch.fcgi?db=pubmed&retmode=xml&id=" +
                                url_encode(text::join(pmids, ","))));
  return parse_pubmed_xml(r.body);
}

namespace {

std::string xml_unescape(std::string s) {
  s = text::replace_all(std::move(s), "&lt;", "<");
  s = text::replace_all(std::move(s), "&gt;", ">");
  s = text::replace_all(std::move(s), "&quot;", "\"");
  s = text::replace_all(std::move(s), "&apos;", "'");
  return text::replace_all(std::move(s), "&amp;", "&");
}

std::string strip_tags(const std::string& s) {
  static const std::regex kTag("<[^>]+>");
  return text::collapse_ws(xml_unescape(std::regex_replace(s, kTag, "")));
}

std::vector<std::string> all_elements(const std::string& xml, const std::string& tag) {
  std::vector<std::string> out;
  const std::string open = "<" + tag;
  const std::string close = "</" + tag + ">";
  size_t pos = 0;
  while ((pos = xml.find(open, pos)) != std::string::npos) {
    char next = pos + open.size() < xml.size() ? xml[pos + open.size()] : '\0';
    if (next != '>' && next != ' ') {
      pos += open.size();
      continue;
    }
    auto body_start = xml.find('>', pos);
    auto end = xml.find(close, body_start);
    if (body_start == std::string::npos || end == std::string::npos) break;
    out.push_back(xml.substr(body_start + 1, end - body_start - 1));
    pos = end + close.size();
  }
  return out;
}

std::string first_element(const std::string& xml, const std::string& tag) {
  auto all = all_elements(xml, tag);
  return all.empty() ? std::string() : all.front();
}

}  // namespace

std::vector<SourceDocument> parse_pubmed_xml(const std::string& xml) {
  std::vector<SourceDocument> docs;
  for (const auto& article : all_elements(xml, "PubmedArticle")) {
    SourceDocument d;
    d.pmid = strip_tags(first_element(article, "PMID"));
    d.title = strip_tags(first_element(article, "ArticleTitle"));
    std::vector<std::string> parts;
    for (const auto& a : all_elements(article, "AbstractText")) parts.push_back(strip_tags(a));
    d.text = text::join(parts, " ");
    auto journal = strip_tags(first_element(first_element(article, "Journal"), "Title"));
    if (!journal.empty()) d.journal = journal;
    auto year = text::parse_long(strip_tags(first_element(first_element(article, "PubDate"), "Year")));
    if (year) d.publication_year = static_cast<int>(*year);
    for (const auto& pt : all_elements(article, "PublicationType"))
      d.publication_types.push_back(strip_tags(pt));
    static const std::regex kPmc("<ArticleId IdType=\"pmc\">(PMC[0-9]+)</ArticleId>");
    std::smatch m;
    if (std::regex_search(article, m, kPmc)) d.pmc_id = m[1].str();
    d.study_type = label_study_type(d.publication_types, d.title);
    if (d.pmid.empty() || text::trim(d.text).empty()) continue;  // no abstract
    docs.push_back(std::move(d));
  }
  return docs;
}

// ---------------------------------------------------------------------------

LiveOntologySource::LiveOntologySource(std::string ols_base, EutilsDocumentSource& pubmed,
                                       HttpGetFn get)
    : ols_base_(std::move(ols_base)), pubmed_(pubmed), get_(get ? std::move(get) : default_http_get()) {}

json LiveOntologySource::lookup(const std::string& disease_id) {
  auto prefix = text::lower(disease_id.substr(0, disease_id.find(':')));
  auto r = get_(ols_base_ + "/api/ontologies/" + url_encode(prefix) +
                "/terms?obo_id=" + url_encode(disease_id));
  if (r.status == 404) fail(ErrorKind::kNotFound, "unknown disease " + disease_id);
  if (r.status != 200)
    throw TransportError("OLS lookup failed with HTTP " + std::to_string(r.status), 1, r.status);
  json body = json::parse(r.body, nullptr, false);
  if (body.is_discarded() || !body.contains("_embedded"))
    fail(ErrorKind::kNotFound, "unknown disease " + disease_id);
  const auto& term = body["_embedded"]["terms"].at(0);
  json out = json::object();
  out["disease_id"] = disease_id;
  out["name"] = term.value("label", disease_id);
  out["synonyms"] = term.contains("synonyms") && term["synonyms"].is_array()
                        ? term["synonyms"]
                        : json::array();
  out["differential_diseases"] = json::array();
  out["known_genes"] = json::array();
  out["known_phenotypes"] = json::array();
  DiseaseProfile tmp;
  tmp.name = out["name"].get<std::string>();
  tmp.synonyms = out["synonyms"].get<std::vector<std::string>>();
  out["pubmed_count"] = pubmed_.count(build_search_query(tmp));
  out["pmc_fulltext_available"] = false;
  return out;
}

}  // namespace chronokg
