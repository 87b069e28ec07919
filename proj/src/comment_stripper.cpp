#include "ciao/comment_stripper.hpp"

#include <cstddef>

namespace ciao {

namespace {

bool matches_at(std::string_view text, std::size_t pos, std::string_view token) {
    return !token.empty() && text.compare(pos, token.size(), token) == 0;
}

} // namespace

std::string strip_comments(std::string_view text, const LanguageKind& kind,
                           std::vector<std::string>* warnings) {
    if (kind.line_comment_markers.empty() && kind.block_comment_pairs.empty()) {
        return std::string(text);
    }

    enum class State { Code, InString, LineComment, BlockComment };

    std::string out;
    out.reserve(text.size());

    State state = State::Code;
    const StringDelimiter* active_string = nullptr;
    const std::pair<std::string, std::string>* active_block = nullptr;

    std::size_t i = 0;
    while (i < text.size()) {
        switch (state) {
        case State::Code: {
            bool consumed = false;
            for (const auto& delim : kind.string_delimiters) {
                if (matches_at(text, i, delim.open)) {
                    out.append(delim.open);
                    i += delim.open.size();
                    active_string = &delim;
                    state = State::InString;
                    consumed = true;
                    break;
                }
            }
            if (consumed) {
                break;
            }
            for (const auto& marker : kind.line_comment_markers) {
                if (matches_at(text, i, marker)) {
                    i += marker.size();
                    state = State::LineComment;
                    consumed = true;
                    break;
                }
            }
            if (consumed) {
                break;
            }
            for (const auto& pair : kind.block_comment_pairs) {
                if (matches_at(text, i, pair.first)) {
                    i += pair.first.size();
                    active_block = &pair;
                    state = State::BlockComment;
                    consumed = true;
                    break;
                }
            }
            if (consumed) {
                break;
            }
            out.push_back(text[i]);
            ++i;
            break;
        }
        case State::InString: {
            if (active_string->backslash_escape && text[i] == '\\' && i + 1 < text.size()) {
                out.push_back(text[i]);
                out.push_back(text[i + 1]);
                i += 2;
                break;
            }
            if (matches_at(text, i, active_string->close)) {
                out.append(active_string->close);
                i += active_string->close.size();
                active_string = nullptr;
                state = State::Code;
                break;
            }
            out.push_back(text[i]);
            ++i;
            break;
        }
        case State::LineComment: {
            if (text[i] == '\n') {
                out.push_back('\n');
                state = State::Code;
            }
            ++i;
            break;
        }
        case State::BlockComment: {
            if (matches_at(text, i, active_block->second)) {
                i += active_block->second.size();
                active_block = nullptr;
                state = State::Code;
                break;
            }
            ++i;
            break;
        }
        }
    }

    if (state == State::BlockComment && warnings != nullptr) {
        warnings->push_back("unterminated block comment; stripped to end of text");
    }

    return out;
}

} // namespace ciao
