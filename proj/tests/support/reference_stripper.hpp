#pragma once

#include <string>
#include <string_view>

#include "ciao/language.hpp"

namespace ciao::testing {

/// Independent brute-force comment stripper used as the oracle for
/// strip_comments. It shares the LanguageKind tables (those define the
/// language) but none of the implementation: instead of a character state
/// machine it repeatedly locates the earliest significant token with
/// substring searches and splices the text around it.
std::string reference_strip(std::string_view text, const ciao::LanguageKind& kind);

} // namespace ciao::testing
