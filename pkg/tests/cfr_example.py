"""Worked example from the CFR 561.2 comparison (plain text, emphasis removed)."""

GOLDEN = (
    '561.2 Account. "The term account means any savings account, demand account, '
    "certificate account, tax and loan account, note account, United States Treasury "
    "general account or United States Treasury time deposit-open account, whether in "
    'the form of a deposit or a share, held by an account holder in a savings association."'
)

KG_ANSWER = (
    "Based on the 2002 version of 561.2, an 'account' is defined as any savings account, "
    "demand account, certificate account, tax and loan account, note account, United "
    "States Treasury general account, or United States Treasury time deposit-open "
    "account, held by an account holder in a savings association. Specific examples of "
    "account types mentioned within this definition include savings accounts, demand "
    "accounts, and certificate accounts."
)

RAG_ANSWER = (
    'According to 561.2 from 2002, an "account" means any account established to provide '
    "benefits, a pension, a retirement plan, or compensation of any kind. Specific, "
    "distinct types of accounts that fall under this definition include: Benefit "
    "accounts, Pension accounts, Retirement plan accounts, Compensation accounts."
)

PUBLISHED_KG_SCORE = 0.5714
PUBLISHED_RAG_SCORE = 0.0952

# tokenized by hand with the pinned rules (lowercase, split on non-alphanumerics,
# drop one-character tokens and stopwords)
GOLDEN_KEYWORDS = frozenset(
    "561 account term means savings demand certificate tax loan note united states "
    "treasury general time deposit open whether form share held holder association".split()
)
KG_KEYWORDS_COUNT, KG_SHARED = 30, 18
RAG_KEYWORDS_COUNT, RAG_SHARED = 21, 3
