// Generates the bundled URL corpus fixture: a PhishTank-shaped CSV of
// phishing URLs and a bare-list file of legitimate URLs. Deterministic under
// --seed, so the committed fixtures can be regenerated byte-identically.
//
// The two classes are built from realistic URL grammars: phishing URLs use
// brand-impersonating subdomain chains, typosquats, raw IPv4 hosts, '@'
// tricks, compromised-site deep paths, free-hosting subdomains, shorteners,
// and credential-harvest query strings; legitimate URLs use well-known
// domains with ordinary content paths. "www" appears at the same rate in
// both classes on purpose, and no path ever contains "//".

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

namespace fs = std::filesystem;

namespace {

using Rng = std::mt19937_64;

const std::vector<std::string> kLegitDomains = {
    "google.com", "youtube.com", "wikipedia.org", "github.com", "reddit.com",
    "amazon.com", "apple.com", "microsoft.com", "mozilla.org", "python.org",
    "stackoverflow.com", "nytimes.com", "bbc.co.uk", "cnn.com", "theguardian.com",
    "reuters.com", "bloomberg.com", "espn.com", "imdb.com", "netflix.com",
    "spotify.com", "soundcloud.com", "vimeo.com", "twitch.tv", "twitter.com",
    "instagram.com", "linkedin.com", "pinterest.com", "tumblr.com", "quora.com",
    "medium.com", "wordpress.org", "etsy.com", "ebay.com", "walmart.com",
    "target.com", "bestbuy.com", "homedepot.com", "ikea.com", "zara.com",
    "nike.com", "adidas.com", "airbnb.com", "booking.com", "expedia.com",
    "tripadvisor.com", "kayak.com", "weather.com", "nationalgeographic.com",
    "nasa.gov", "noaa.gov", "usda.gov", "cdc.gov", "nih.gov", "loc.gov",
    "europa.eu", "un.org", "who.int", "redcross.org", "wwf.org",
    "mit.edu", "stanford.edu", "harvard.edu", "berkeley.edu", "ox.ac.uk",
    "cam.ac.uk", "ethz.ch", "utoronto.ca", "anu.edu.au", "kyoto-u.ac.jp",
    "arxiv.org", "nature.com", "sciencemag.org", "ieee.org", "acm.org",
    "springer.com", "elsevier.com", "jstor.org", "plos.org", "pnas.org",
    "cplusplus.com", "cppreference.com", "rust-lang.org", "golang.org",
    "nodejs.org", "npmjs.com", "pypi.org", "crates.io", "dockerhub.com",
    "kernel.org", "gnu.org", "apache.org", "debian.org", "ubuntu.com",
    "fedoraproject.org", "archlinux.org", "freebsd.org", "gitlab.com",
    "bitbucket.org", "sourceforge.net", "codeproject.com", "dev.to",
    "hackernews.com", "slashdot.org", "arstechnica.com", "wired.com",
    "techcrunch.com", "theverge.com", "engadget.com", "zdnet.com",
    "tomshardware.com", "anandtech.com", "phoronix.com", "lwn.net",
    "duckduckgo.com", "bing.com", "yahoo.com", "baidu.com", "yandex.com",
    "aliexpress.com", "rakuten.co.jp", "flipkart.com", "mercadolibre.com",
    "shopify.com", "squarespace.com", "wix.com", "godaddy.com",
    "cloudflare.com", "akamai.com", "fastly.com", "digitalocean.com",
    "linode.com", "heroku.com", "vercel.com", "netlify.com",
    "dropbox.com", "box.com", "slack.com", "zoom.us", "notion.so",
    "trello.com", "asana.com", "atlassian.com", "salesforce.com",
    "oracle.com", "ibm.com", "intel.com", "amd.com", "nvidia.com",
    "qualcomm.com", "samsung.com", "sony.com", "lg.com", "panasonic.com",
    "philips.com", "siemens.com", "bosch.com", "ge.com", "boeing.com",
    "airbus.com", "tesla.com", "toyota.com", "honda.com", "bmw.com",
    "mercedes-benz.com", "volkswagen.com", "ford.com", "chevrolet.com",
    "allrecipes.com", "foodnetwork.com", "epicurious.com", "seriouseats.com",
    "bonappetit.com", "tasteofhome.com", "delish.com", "yummly.com",
    "goodreads.com", "audible.com", "scribd.com", "gutenberg.org",
    "openlibrary.org", "archive.org", "britannica.com", "merriam-webster.com",
    "dictionary.com", "thesaurus.com", "duolingo.com", "khanacademy.org",
    "coursera.org", "edx.org", "udemy.com", "udacity.com", "brilliant.org",
    "codecademy.com", "leetcode.com", "hackerrank.com", "kaggle.com",
    "healthline.com", "webmd.com", "mayoclinic.org", "clevelandclinic.org",
    "psychologytoday.com", "verywellmind.com", "menshealth.com",
    "womenshealthmag.com", "runnersworld.com", "bicycling.com",
    "outsideonline.com", "rei.com", "patagonia.com", "thenorthface.com",
    "columbia.com", "backcountry.com", "moosejaw.com", "basspro.com",
    "cabelas.com", "orvis.com", "fieldandstream.com", "bhphotovideo.com",
    "adorama.com", "dpreview.com", "petapixel.com", "fstoppers.com",
    "smugmug.com", "flickr.com", "500px.com", "unsplash.com", "pexels.com",
};

const std::vector<std::string> kWords = {
    "article",  "autumn",   "bridge",   "camera",   "castle",   "cinema",
    "clever",   "cloud",    "coffee",   "compass",  "copper",   "cotton",
    "cradle",   "crystal",  "culture",  "dawn",     "desert",   "design",
    "digital",  "dolphin",  "dragon",   "meadow",   "electric", "ember",
    "engine",   "evening",  "falcon",   "feather",  "fiction",  "forest",
    "fortune",  "fountain", "galaxy",   "garden",   "gentle",   "glacier",
    "granite",  "gravity",  "guitar",   "harbor",   "harvest",  "hazel",
    "heritage", "hidden",   "history",  "hollow",   "horizon",  "island",
    "ivory",    "jasmine",  "journey",  "jungle",   "kitchen",  "lantern",
    "lavender", "legend",   "library",  "lighthouse", "linen",  "little",
    "lunar",    "machine",  "magnet",   "manual",   "maple",    "marble",
    "market",   "melody",   "memory",   "mirror",   "morning",  "mountain",
    "museum",   "music",    "nature",   "nebula",   "needle",   "north",
    "notebook", "ocean",    "orchard",  "orchid",   "oxygen",   "palace",
    "paper",    "pattern",  "pepper",   "physics",  "pioneer",  "planet",
    "pocket",   "poetry",   "portrait", "prairie",  "pyramid",  "quartz",
    "quiet",    "rabbit",   "rainbow",  "recipe",   "research", "review",
    "ribbon",   "river",    "rocket",   "saffron",  "sailing",  "sapphire",
    "science",  "season",   "shadow",   "signal",   "silver",   "sketch",
    "smooth",   "spice",    "spring",   "stadium",  "station",  "stellar",
    "stone",    "story",    "stream",   "studio",   "summer",   "sunset",
    "symphony", "teacher",  "temple",   "theater",  "thunder",  "timber",
    "tomato",   "travel",   "tropical", "tunnel",   "turtle",   "valley",
    "velvet",   "village",  "violet",   "vision",   "voyage",   "walnut",
    "weather",  "willow",   "window",   "winter",   "wisdom",   "wonder",
};

const std::vector<std::string> kBrands = {
    "paypal",     "amazon",   "apple",    "microsoft", "netflix",
    "facebook",   "instagram", "whatsapp", "chase",     "wellsfargo",
    "citibank",   "hsbc",     "barclays", "santander", "coinbase",
    "binance",    "blockchain", "steam",   "epicgames", "roblox",
    "dhl",        "fedex",    "usps",     "ups",       "royalmail",
    "dropbox",    "adobe",    "linkedin", "ebay",      "alibaba",
    "americanexpress", "mastercard", "visa", "venmo",  "zelle",
    "irs",        "gov-refund", "hmrc",   "netbank",   "interac",
};

const std::vector<std::string> kBrandTargets = {
    "PayPal",    "Amazon.com", "Apple",    "Microsoft", "Netflix",
    "Facebook",  "Instagram",  "WhatsApp", "JPMorgan Chase and Co.",
    "Wells Fargo", "Citibank", "HSBC Group", "Barclays Bank PLC",
    "Santander UK", "Coinbase", "Binance",  "Blockchain", "Steam",
    "Epic Games", "Roblox",    "DHL",      "FedEx",     "United States Postal Service",
    "UPS",       "Royal Mail", "Dropbox",  "Adobe",     "LinkedIn",
    "eBay, Inc.", "Alibaba.com", "American Express", "Mastercard", "Visa",
    "Venmo",     "Zelle",      "Internal Revenue Service", "Her Majesty's Revenue and Customs",
    "NetBank",   "Interac Association",
};

const std::vector<std::string> kShadyTlds = {
    "ru", "tk", "ml", "ga", "cf", "gq", "xyz", "top", "icu", "buzz",
    "club", "online", "site", "website", "live", "cam", "rest", "su",
};

const std::vector<std::string> kFreeHosts = {
    "weebly.com",      "000webhostapp.com", "wixsite.com",  "blogspot.com",
    "duckdns.org",     "netlify.app",       "herokuapp.com", "firebaseapp.com",
    "repl.co",         "glitch.me",         "pages.dev",     "webnode.page",
};

const std::vector<std::string> kShorteners = {
    "bit.ly", "goo.gl", "tinyurl.com", "t.co", "ow.ly",
    "is.gd",  "buff.ly", "adf.ly",     "bit.do", "cutt.ly",
};

const std::vector<std::string> kPhishFiles = {
    "webscr.php",      "signin.php",    "login.html",     "secure.php",
    "verify.php",      "confirm.php",   "account-update.php", "validation.php",
    "session.php",     "recovery.html", "billing.php",    "wallet-connect.html",
    "authenticate.php", "index.php",    "update-info.php", "security-check.php",
};

const std::vector<std::string> kPhishDirs = {
    "webscr",   "signin",  "secure",  "verify", "confirm", "account",
    "update",   "billing", "support", "session", "recovery", "wallet",
    "customer-center", "security", "verification-center", "service-desk",
    "auth",     "portal",  "banking", "login",
};

// Ordinary service subdomains; they carry the same extra dot a www prefix
// does, so the dot count alone cannot be explained by www.
const std::vector<std::string> kLegitSubdomains = {
    "docs", "blog", "news", "shop", "mail", "en", "api", "support",
    "store", "m", "forum", "help", "dev", "static", "media",
};

const std::vector<std::string> kLegitSections = {
    "news", "articles", "blog", "docs", "wiki", "guides", "reviews",
    "topics", "research", "library", "archive", "gallery", "help",
    "learn", "explore", "community", "events", "projects", "reference",
};

template <typename T>
const T& pick(const std::vector<T>& pool, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, pool.size() - 1);
  return pool[dist(rng)];
}

bool chance(double p, Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::size_t uniform(std::size_t lo, std::size_t hi, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string digits(std::size_t n, Rng& rng) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += static_cast<char>('0' + rng() % 10);
  return out;
}

std::string hex_token(std::size_t n, Rng& rng) {
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += kHex[rng() % 16];
  return out;
}

std::string base62(std::size_t n, Rng& rng) {
  static const std::string kChars =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += kChars[rng() % kChars.size()];
  return out;
}

std::string scheme(double https_rate, Rng& rng) {
  return chance(https_rate, rng) ? "https://" : "http://";
}

// Both classes carry a www prefix on exactly the same fraction of URLs
// (assigned by quota, not by coin) so the feature holds no class signal.
// Raw-IP phishing hosts cannot take the prefix; a www-quota draw re-rolls
// away from that shape.
constexpr double kWwwRate = 0.06;

std::string www_prefix(bool www) { return www ? "www." : ""; }

// ---------------------------------------------------------------------------
// Legitimate URLs
// ---------------------------------------------------------------------------

std::string legit_path(Rng& rng) {
  const int kind = static_cast<int>(uniform(0, 9, rng));
  switch (kind) {
    case 0:
      return "";
    case 1:
      return "/";
    case 2:
      return "/" + pick(kWords, rng);
    case 3:
      return "/" + pick(kWords, rng) + "-" + pick(kWords, rng);
    case 4:
      return "/" + pick(kLegitSections, rng) + "/" + pick(kWords, rng) + "-" +
             pick(kWords, rng);
    case 5: {
      std::string a = pick(kWords, rng), b = pick(kWords, rng);
      a[0] = static_cast<char>(std::toupper(a[0]));
      b[0] = static_cast<char>(std::toupper(b[0]));
      return "/wiki/" + a + "_" + b;
    }
    case 6:
      return "/" + pick(kWords, rng) + "/" + pick(kWords, rng);
    case 7:
      return "/docs/" + pick(kWords, rng) + "/" + pick(kWords, rng) + ".html";
    case 8:
      return "/" + pick(kLegitSections, rng) + "/20" +
             std::to_string(uniform(10, 24, rng)) + "/" + pick(kWords, rng) + "-" +
             pick(kWords, rng) + "-" + pick(kWords, rng);
    default:
      return "/" + pick(kLegitSections, rng) + "/" +
             std::to_string(uniform(1, 99999, rng));
  }
}

std::string legit_query(Rng& rng) {
  if (!chance(0.25, rng)) return "";
  if (chance(0.5, rng)) return "?q=" + pick(kWords, rng) + "+" + pick(kWords, rng);
  std::string q = "?id=" + digits(uniform(2, 6, rng), rng);
  if (chance(0.4, rng)) q += "&ref=" + pick(kWords, rng);
  return q;
}

std::string make_legit(Rng& rng, bool www) {
  // Bare lists often carry schemeless entries.
  const std::string head = chance(0.12, rng) ? "" : scheme(0.9, rng);
  std::string sub = www_prefix(www);
  if (!www && chance(0.15, rng)) sub = pick(kLegitSubdomains, rng) + ".";
  std::string url = head + sub + pick(kLegitDomains, rng);
  // A small share of real sites legitimately carry an auth-ish path.
  if (chance(0.05, rng)) {
    url += chance(0.5, rng) ? "/login" : "/account/settings";
    url += legit_query(rng);
    return url;
  }
  // Long tracking/catalog URLs look superficially phishy but are benign.
  if (chance(0.04, rng)) {
    url += "/" + pick(kLegitSections, rng) + "/" + pick(kWords, rng) + "-" +
           pick(kWords, rng) + "?utm_source=" + pick(kWords, rng) +
           "&utm_medium=" + pick(kWords, rng);
    if (chance(0.5, rng)) {
      url += "&utm_campaign=" + pick(kWords, rng) + digits(uniform(2, 4, rng), rng);
    }
    return url;
  }
  if (chance(0.05, rng)) {
    url += "/p/" + digits(uniform(6, 9, rng), rng) + "/" + pick(kWords, rng) +
           "-" + pick(kWords, rng);
    return url;
  }
  url += legit_path(rng) + legit_query(rng);
  return url;
}

// ---------------------------------------------------------------------------
// Phishing URLs
// ---------------------------------------------------------------------------

std::string shady_host(Rng& rng) {
  std::string host = pick(kWords, rng);
  if (chance(0.35, rng)) host += "-" + pick(kWords, rng);
  if (chance(0.4, rng)) host += digits(uniform(1, 3, rng), rng);
  return host;
}

std::string maybe_subdomain(Rng& rng, bool www) {
  if (www) return "www.";
  if (chance(0.15, rng)) return pick(kLegitSubdomains, rng) + ".";
  return "";
}

std::string phish_dir_chain(Rng& rng) {
  std::string path;
  const std::size_t depth = uniform(2, 4, rng);
  for (std::size_t i = 0; i < depth; ++i) path += "/" + pick(kPhishDirs, rng);
  return path;
}

std::string phish_query(Rng& rng) {
  if (!chance(0.75, rng)) return "";
  std::string q = "?cmd=_" + pick(kPhishDirs, rng) + "-run";
  if (chance(0.7, rng)) q += "&dispatch=" + hex_token(uniform(16, 48, rng), rng);
  if (chance(0.5, rng)) q += "&id=" + digits(uniform(4, 10, rng), rng);
  if (chance(0.4, rng)) q += "&token=" + hex_token(uniform(16, 32, rng), rng);
  if (chance(0.3, rng)) {
    q += "&redirect=" + std::string(chance(0.5, rng) ? "http" : "https") + "%3A%2F%2F" +
         pick(kBrands, rng) + ".com";
  }
  return q;
}

std::string typo_brand(Rng& rng) {
  const std::string original = pick(kBrands, rng);
  std::string b = original;
  const int mutation = static_cast<int>(uniform(0, 2, rng));
  if (mutation == 0) {
    // Swap a letter for a lookalike.
    for (char& c : b) {
      if (c == 'l') { c = '1'; break; }
      if (c == 'o') { c = '0'; break; }
      if (c == 'a') { c = '4'; break; }
    }
  } else if (mutation == 1 && b.size() > 3) {
    b.insert(b.size() / 2, 1, b[b.size() / 2]);  // doubled letter
  }
  if (b == original) b += digits(1, rng);
  return b;
}

std::string make_phish(Rng& rng, bool www) {
  int kind = static_cast<int>(uniform(0, 99, rng));
  while (www && kind >= 45 && kind < 55) {  // IP hosts cannot carry www
    kind = static_cast<int>(uniform(0, 99, rng));
  }

  if (kind < 30) {
    // Brand-impersonating subdomain chain on a shady domain.
    const std::string brand =
        pick(kBrands, rng) + (chance(0.6, rng) ? ".com" : "");
    return scheme(0.4, rng) + maybe_subdomain(rng, www) + brand + "." +
           shady_host(rng) + "." + pick(kShadyTlds, rng) + phish_dir_chain(rng) +
           "/" + pick(kPhishFiles, rng) + phish_query(rng);
  }
  if (kind < 45) {
    // Typosquatted brand domain.
    return scheme(0.4, rng) + www_prefix(www) + typo_brand(rng) + "-" +
           pick(kPhishDirs, rng) + "." + pick(kShadyTlds, rng) +
           phish_dir_chain(rng) + "/" + pick(kPhishFiles, rng) + phish_query(rng);
  }
  if (kind < 55) {
    // Raw IPv4 host, often with little else to give it away.
    std::string ip = std::to_string(uniform(11, 223, rng));
    for (int i = 0; i < 3; ++i) ip += "." + std::to_string(uniform(0, 255, rng));
    std::string url = "http://" + ip;
    if (chance(0.4, rng)) url += phish_dir_chain(rng);
    url += "/" + pick(kPhishFiles, rng);
    if (chance(0.35, rng)) url += phish_query(rng);
    return url;
  }
  if (kind < 61) {
    // Userinfo '@' trick: the real host hides after the brand.
    return scheme(0.4, rng) + pick(kBrands, rng) + ".com@" +
           www_prefix(www) + shady_host(rng) + "." +
           pick(kShadyTlds, rng) + phish_dir_chain(rng) + "/" +
           pick(kPhishFiles, rng) + phish_query(rng);
  }
  if (kind < 79) {
    // Compromised site with a deep generated path.
    return scheme(0.5, rng) + maybe_subdomain(rng, www) + pick(kWords, rng) +
           pick(kWords, rng) + "." + (chance(0.6, rng) ? "com" : "net") +
           "/wp-content/" + pick(kWords, rng) + "/" +
           hex_token(uniform(20, 56, rng), rng) + "/" + pick(kPhishFiles, rng) +
           phish_query(rng);
  }
  if (kind < 91) {
    // Free-hosting subdomain.
    return "https://" + www_prefix(www) + pick(kBrands, rng) + "-" +
           pick(kPhishDirs, rng) + "-" +
           digits(uniform(2, 4, rng), rng) + "." + pick(kFreeHosts, rng) + "/" +
           pick(kPhishFiles, rng) + (chance(0.4, rng) ? phish_query(rng) : "");
  }
  if (kind < 94) {
    // Shortener.
    return "https://" + www_prefix(www) + pick(kShorteners, rng) +
           "/" + base62(uniform(6, 8, rng), rng);
  }
  if (kind < 97) {
    // Bare typosquat root, hardly distinguishable lexically.
    std::string url = scheme(0.5, rng) + www_prefix(www) + typo_brand(rng) + ".com/";
    if (chance(0.5, rng)) url += pick(kPhishDirs, rng);
    return url;
  }
  // Credential-harvest query on a bare shady host.
  return "http://" + www_prefix(www) + shady_host(rng) + "." +
         pick(kShadyTlds, rng) + "/" +
         pick(kPhishFiles, rng) + "?cmd=_" + pick(kPhishDirs, rng) + "-run&dispatch=" +
         hex_token(32, rng) + "&" + pick(kWords, rng) + "=" + hex_token(16, rng);
}

std::string submission_time(Rng& rng) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "2024-%02zu-%02zuT%02zu:%02zu:%02zu+00:00",
                uniform(1, 12, rng), uniform(1, 28, rng), uniform(0, 23, rng),
                uniform(0, 59, rng), uniform(0, 59, rng));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the bundled phishing/legitimate URL corpus fixture"};
  std::string out_dir = "data/fixtures";
  std::size_t phish_count = 5200;
  std::size_t legit_count = 5200;
  std::uint64_t seed = 1337;
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--phish-count", phish_count, "phishing URLs to generate");
  app.add_option("--legit-count", legit_count, "legitimate URLs to generate");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(out_dir);
  Rng rng(seed);

  std::unordered_set<std::string> seen;
  auto www_quota = [&](std::size_t count) {
    std::vector<char> quota(count, 0);
    std::fill_n(quota.begin(),
                static_cast<std::size_t>(kWwwRate * static_cast<double>(count)), 1);
    std::shuffle(quota.begin(), quota.end(), rng);
    return quota;
  };
  auto generate_unique = [&](auto&& gen, std::size_t count) {
    const std::vector<char> quota = www_quota(count);
    std::vector<std::string> urls;
    urls.reserve(count);
    while (urls.size() < count) {
      std::string url = gen(rng, quota[urls.size()] != 0);
      if (seen.insert(url).second) urls.push_back(std::move(url));
    }
    return urls;
  };

  const std::vector<std::string> phish =
      generate_unique([](Rng& r, bool www) { return make_phish(r, www); }, phish_count);
  const std::vector<std::string> legit =
      generate_unique([](Rng& r, bool www) { return make_legit(r, www); }, legit_count);

  {
    std::ofstream out(fs::path(out_dir) / "phishing_urls.csv", std::ios::binary);
    out << "phish_id,url,phish_detail_url,submission_time,verified,"
           "verification_time,online,target\n";
    for (std::size_t i = 0; i < phish.size(); ++i) {
      const std::size_t id = 8000000 + i;
      const std::string target =
          chance(0.7, rng) ? pick(kBrandTargets, rng) : std::string("Other");
      out << id << ',' << phish[i] << ",http://checker.example/phish_detail?id="
          << id << ',' << submission_time(rng) << ','
          << (chance(0.9, rng) ? "yes" : "no") << ',' << submission_time(rng) << ','
          << (chance(0.85, rng) ? "yes" : "no") << ",\"" << target << "\"\n";
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "legitimate_urls.txt", std::ios::binary);
    for (const auto& url : legit) out << url << '\n';
  }

  double phish_len = 0.0, legit_len = 0.0, phish_www = 0.0, legit_www = 0.0;
  for (const auto& u : phish) {
    phish_len += static_cast<double>(u.size());
    phish_www += u.find("www") != std::string::npos ? 1 : 0;
  }
  for (const auto& u : legit) {
    legit_len += static_cast<double>(u.size());
    legit_www += u.find("www") != std::string::npos ? 1 : 0;
  }
  std::cerr << "phish: " << phish.size() << " urls, mean length "
            << phish_len / static_cast<double>(phish.size()) << ", www rate "
            << phish_www / static_cast<double>(phish.size()) << '\n'
            << "legit: " << legit.size() << " urls, mean length "
            << legit_len / static_cast<double>(legit.size()) << ", www rate "
            << legit_www / static_cast<double>(legit.size()) << '\n';
  return 0;
}
