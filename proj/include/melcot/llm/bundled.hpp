#pragma once

#include <string_view>

// Default prompt templates. The same text ships as templates/*.txt so it can
// be copied and edited; a test keeps both copies identical.

namespace melcot::llm {

inline constexpr std::string_view kEnhanceTemplate = R"tpl(You are a senior code reviewer. Rewrite the raw review comment below into a
complete, professional review of the same issue. Keep the technical claim of
the original comment; do not invent new problems.

Language: {language}
File: {file_path}

Code under review (line numbers on the left):
{code}

Change under review:
{diff}

Raw review comment:
{raw_comment}

The comment refers to lines: {label_lines}

Write the enhanced review using exactly these four labelled parts, each
starting on its own line:
LOCATION: the precise code location of the problem (line numbers and construct)
EXPLANATION: a professional explanation of the problem and its root cause
IMPACT: an assessment of the potential impact if the problem is not fixed
SUGGESTION: the suggested solution, with a short code sketch when helpful
)tpl";

inline constexpr std::string_view kLongCotTemplate = R"tpl(=== body ===
You are an experienced code reviewer. Review the change below the way a
careful human reviewer would, reasoning step by step before you answer.

Language: {language}
File: {file_path}

Code under review (line numbers on the left):
{code}

Change under review (line numbers refer to the code above):
{diff}

Work through the following steps in order. Start each step with the
markdown header given for it.

{steps}

Finish with your answer in exactly this form:
LINES: <problematic line numbers or ranges, e.g. 12, 40-44; write none if there is no issue>
COMMENT: <the review comment describing the most important issue and how to fix it>

=== step:summary ===
Step {index}: Summary (header "## Summary")
Summarize the functionality the code implements and its primary execution paths.

=== step:key_code_flows ===
Step {index}: Key code flows (header "## Key code flows")
Trace the key code flows: how data and control move through the code, which
components interact, and which paths the change can reach.

=== step:diff_analyze ===
Step {index}: Diff analyze (header "## Diff analyze")
Examine the modifications introduced by the change line by line and assess
whether and how they alter the intended functionality or outcomes.

=== step:issue_check ===
Step {index}: Issue check (header "## Issue check")
Check the code for quality issues along each of these dimensions:
1. Error and exception handling, and coverage of edge cases.
2. Resource management (memory, file handles, connections, locks, etc.).
3. Correct usage of APIs and dependencies.
4. Common vulnerability patterns (injection, overflow, unchecked input, races, etc.).
)tpl";

inline constexpr std::string_view kRegularCotTemplate = R"tpl(You are a code reviewer. Review the change below in three phases: first
locate the problematic code, then describe the issue at that location, and
finally suggest how to repair it.

Language: {language}
File: {file_path}

Code under review (line numbers on the left):
{code}

Change under review (line numbers refer to the code above):
{diff}

Answer in exactly this form:
LINES: <problematic line numbers or ranges, e.g. 12, 40-44; write none if there is no issue>
COMMENT: <description of the issue followed by the suggested repair>
)tpl";

inline constexpr std::string_view kJudgeTemplate = R"tpl(You are judging an automatically generated code review against a reference
review written by a human expert. Decide whether the generated review
identifies the same issue as the reference review. Focus on the content of
the issue, not on wording, tone or formatting. Extra remarks in the generated
review are acceptable as long as the reference issue is identified.

Reference review:
{reference}

Generated review:
{generated}

Reply with a single word: YES if the generated review identifies the same
issue as the reference review, otherwise NO.
)tpl";

inline constexpr std::string_view kScreenTemplate = R"tpl(You are cleaning a dataset of code review comments. Decide whether the
comment below carries a technical problem statement worth learning from, or
whether it is low-value noise in one of these categories:
Confirmation (acknowledgement or status update), SubmissionNotice (bot
message about a commit), PullRequestEvent (merge or open notification),
UrlReference (mostly a link), Mention (a notification of another user),
TestSuggestion (asks for tests without justification).

Comment:
{comment}

Reply with exactly one token: KEEP, or REJECT:<Category> using one of the
category names above.
)tpl";

}  // namespace melcot::llm
