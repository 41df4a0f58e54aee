#include <string>
#include <string_view>
#include <vector>

#include "spearlens/corpus.hpp"
#include "spearlens/errors.hpp"

namespace spearlens {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes the UTF-8 sequence starting at text[i] and advances i past it.
// Malformed bytes decode as kReplacement and consume one byte.
char32_t decode_utf8(std::string_view text, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + len > text.size()) {
        ++i;
        return kReplacement;
    }
    for (int j = 1; j < len; ++j) {
        const auto b = static_cast<unsigned char>(text[i + j]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// ASCII alphanumerics are classified exactly. Non-ASCII code points count as
// letters except the blocks that show up as punctuation in western text:
// Latin-1 punctuation/symbols, the multiplication and division signs, and
// the general punctuation block (curly quotes, dashes, ellipsis).
bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
               (cp >= 'A' && cp <= 'Z');
    }
    if (cp <= 0xBF) return false;
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x206F) return false;
    return true;
}

char32_t lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
    return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t current_chars = 0;

    auto flush = [&] {
        if (current_chars >= 2) tokens.push_back(current);
        current.clear();
        current_chars = 0;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = decode_utf8(text, i);
        if (cp != kReplacement && is_word_char(cp)) {
            append_utf8(current, lower(cp));
            ++current_chars;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

NGramStream extract_ngrams(std::string doc_id,
                           std::span<const std::string> tokens, int n_max,
                           const StopWordSet& stop_words) {
    if (n_max < 1 || n_max > 3) {
        throw ValidationError("n_max must be 1, 2, or 3 (got " +
                              std::to_string(n_max) + ")");
    }

    std::vector<std::string_view> kept;
    kept.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (!stop_words.contains(token)) kept.emplace_back(token);
    }

    NGramStream stream{std::move(doc_id), {}};
    const std::size_t len = kept.size();
    for (int n = 1; n <= n_max; ++n) {
        if (len + 1 < static_cast<std::size_t>(n) + 1) break;
        for (std::size_t i = 0; i + n <= len; ++i) {
            std::string gram{kept[i]};
            for (int j = 1; j < n; ++j) {
                gram += ' ';
                gram += kept[i + j];
            }
            stream.grams.push_back(std::move(gram));
        }
    }
    return stream;
}

std::vector<NGramStream> ngram_streams(const CampaignManifest& manifest,
                                       int n_max,
                                       const StopWordSet& stop_words) {
    std::vector<NGramStream> streams;
    streams.reserve(manifest.documents.size());
    for (const auto& doc : manifest.documents) {
        streams.push_back(
            extract_ngrams(doc.id, tokenize(doc.text), n_max, stop_words));
    }
    return streams;
}

}  // namespace spearlens
