"""Corpus plumbing: repo-pool ingestion, the candidate funnel, harness
generation against a pluggable text-completion client, repo-level stratified
splitting, statistics, and the on-disk corpus layout.

The funnel is: repositories (>= 50 stars, permissive license) -> candidate
files (>= 20 LOC, >= 1 definition, <= 30 per repo) -> generated harnesses
(syntactic check only; real acceptance happens in the validator).

Corpus layout on disk:
    corpus/<language>/<program_id>/program.<ext>
    corpus/<language>/<program_id>/callgraph.json      (accepted only)
    corpus/<language>/<program_id>/report.json
    corpus/<language>/<program_id>/meta.json           (repo, license, stars)
    corpus/splits.json                                  repo -> train|test
    corpus/stats.json
"""

from __future__ import annotations

import ast
import hashlib
import json
import random
import re
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import (
    AuthError,
    DegenerateStratumError,
    GenerationClientError,
    MissingGroundTruthError,
    NetworkError,
    NotCompilableError,
    RateLimitedError,
    UnsupportedConstructError,
)
from .java.parser import parse_java_unit
from .js.parser import parse_js_subset
from .prompts import (
    COT_TEMPLATE,
    DISPLAY_NAMES,
    ENTRY_POINT_INSTRUCTIONS,
    EVAL_USER_TEMPLATE,
    HARNESS_TEMPLATE,
    WORKED_EXAMPLES,
)
from .schema import (
    CallGraph,
    Language,
    ProgramInstance,
    Split,
    SplitAssignment,
    count_loc,
    deserialize_callgraph,
    serialize_callgraph,
)
from .validator import serialize_report as _serialize_report

API_TOKEN_ENV = "CALLWITNESS_API_TOKEN"
GITHUB_GRAPHQL_ENDPOINT = "https://api.github.com/graphql"

MIN_STARS = 50
PERMISSIVE_LICENSES = frozenset(
    {"MIT", "Apache-2.0", "BSD-2-Clause", "BSD-3-Clause", "ISC"}
)
MIN_CANDIDATE_LOC = 20
PER_REPO_CAP = 30

# realized test/train ratio of the reference corpus: 2129 / 10583
DEFAULT_TEST_FRACTION = 0.2012

EXTENSIONS = {
    Language.PYTHON: "py",
    Language.JAVASCRIPT: "js",
    Language.JAVA: "java",
}

_GITHUB_LANGUAGE_NAMES = {
    "Python": Language.PYTHON,
    "JavaScript": Language.JAVASCRIPT,
    "Java": Language.JAVA,
}


@dataclass(frozen=True)
class RepoRecord:
    """One repository admitted to (or considered for) the pool."""

    slug: str
    stars: int
    license: str
    language: Language

    def __post_init__(self):
        if self.stars < 0:
            raise ValueError("stars must be >= 0")


@dataclass(frozen=True)
class CandidateFile:
    """One source file pulled from a repository, pre-filter."""

    repo: str
    path: str
    language: Language
    source: str
    loc: int
    def_count: int

    def __post_init__(self):
        if self.loc < 0 or self.def_count < 0:
            raise ValueError("loc and def_count must be >= 0")

    @classmethod
    def create(
        cls, repo: str, path: str, language: Language, source: str
    ) -> "CandidateFile":
        return cls(
            repo, path, language, source, count_loc(source),
            count_definitions(source, language),
        )


def count_definitions(source: str, language: Language) -> int:
    """How many function/class definitions a raw file contains.

    Python counts syntax-tree definition nodes; the other languages use a
    line heuristic, which is all the >= 1 admission rule needs.
    """
    if language is Language.PYTHON:
        try:
            tree = ast.parse(source)
        except SyntaxError:
            return 0
        return sum(
            isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef))
            for node in ast.walk(tree)
        )
    if language is Language.JAVASCRIPT:
        return len(re.findall(r"\bfunction\b|=>|\bclass\s+[A-Za-z_$]", source))
    return len(re.findall(r"\b(?:class|interface|enum)\s+[A-Za-z_$]", source))


@dataclass(frozen=True)
class PoolCriteria:
    """Admission rules for the repository pool query."""

    language: Language
    min_stars: int = MIN_STARS
    licenses: frozenset = PERMISSIVE_LICENSES
    cap: int = 1000

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("cap must be >= 1")


_SEARCH_QUERY = """\
query($searchQuery: String!, $cursor: String) {
  search(query: $searchQuery, type: REPOSITORY, first: 100, after: $cursor) {
    pageInfo { hasNextPage endCursor }
    nodes {
      ... on Repository {
        nameWithOwner
        stargazerCount
        primaryLanguage { name }
        licenseInfo { spdxId }
      }
    }
  }
}
"""


class GitHubGraphQLClient:
    """Minimal GraphQL POST client; token comes from the environment."""

    def __init__(self, token: str | None = None):
        import os

        self.token = token or os.environ.get(API_TOKEN_ENV)
        if not self.token:
            raise AuthError(f"set {API_TOKEN_ENV} to query the repository pool")

    def post_graphql(self, query: str, variables: dict) -> dict:
        try:
            response = requests.post(
                GITHUB_GRAPHQL_ENDPOINT,
                json={"query": query, "variables": variables},
                headers={"Authorization": f"bearer {self.token}"},
                timeout=30,
            )
        except requests.RequestException as exc:
            raise NetworkError(f"cannot reach GitHub: {exc}") from exc
        if response.status_code == 401:
            raise AuthError("GitHub rejected the API token")
        if response.status_code in (403, 429):
            raise RateLimitedError(f"HTTP {response.status_code} from GitHub")
        if response.status_code != 200:
            raise NetworkError(f"HTTP {response.status_code} from GitHub")
        doc = response.json()
        kinds = {e.get("type") for e in doc.get("errors", [])}
        if "RATE_LIMITED" in kinds:
            raise RateLimitedError("GraphQL rate limit hit")
        if kinds:
            raise NetworkError(f"GraphQL errors: {sorted(k for k in kinds if k)}")
        return doc


class FixtureRepoClient:
    """Canned-response client for offline tests.

    pages is a list of search-result pages; each call returns the next one.
    rate_limited_calls makes the first N calls fail, to exercise backoff.
    """

    def __init__(self, pages: list[dict], rate_limited_calls: int = 0):
        self.pages = pages
        self.calls = 0
        self.rate_limited_calls = rate_limited_calls

    def post_graphql(self, query: str, variables: dict) -> dict:
        self.calls += 1
        if self.rate_limited_calls > 0:
            self.rate_limited_calls -= 1
            raise RateLimitedError("fixture rate limit")
        if not self.pages:
            return {
                "data": {
                    "search": {
                        "pageInfo": {"hasNextPage": False, "endCursor": None},
                        "nodes": [],
                    }
                }
            }
        page = self.pages.pop(0)
        return {
            "data": {
                "search": {
                    "pageInfo": {
                        "hasNextPage": bool(self.pages),
                        "endCursor": f"cursor{self.calls}",
                    },
                    "nodes": page,
                }
            }
        }


def _record_from_node(node: dict) -> RepoRecord | None:
    language_name = (node.get("primaryLanguage") or {}).get("name")
    language = _GITHUB_LANGUAGE_NAMES.get(language_name)
    slug = node.get("nameWithOwner")
    if language is None or not slug:
        return None
    license_id = (node.get("licenseInfo") or {}).get("spdxId") or ""
    return RepoRecord(slug, int(node.get("stargazerCount", 0)), license_id, language)


def query_repo_pool(
    api_client,
    criteria: PoolCriteria,
    retries: int = 3,
    backoff_s: float = 1.0,
) -> list[RepoRecord]:
    """Paginate the repository search, keeping admissible records only."""
    search_string = (
        f"language:{DISPLAY_NAMES[criteria.language]} "
        f"stars:>={criteria.min_stars} sort:stars"
    )
    records: list[RepoRecord] = []
    cursor = None
    while True:
        variables = {"searchQuery": search_string, "cursor": cursor}
        for attempt in range(retries + 1):
            try:
                doc = api_client.post_graphql(_SEARCH_QUERY, variables)
                break
            except RateLimitedError:
                if attempt == retries:
                    raise
                time.sleep(backoff_s * (2 ** attempt))
        search = doc["data"]["search"]
        for node in search["nodes"]:
            record = _record_from_node(node)
            if record is None:
                continue
            if record.stars < criteria.min_stars:
                continue
            if record.license not in criteria.licenses:
                continue
            if record.language is not criteria.language:
                continue
            records.append(record)
        if len(records) >= criteria.cap or not search["pageInfo"]["hasNextPage"]:
            break
        cursor = search["pageInfo"]["endCursor"]
    records.sort(key=lambda r: r.slug)
    return records[: criteria.cap]


def filter_candidates(
    files: list[CandidateFile], per_repo_cap: int = PER_REPO_CAP, seed: int = 0
) -> list[CandidateFile]:
    """Apply the size/definition filter, then the per-repo uniform cap."""
    if per_repo_cap < 1:
        raise ValueError("per_repo_cap must be >= 1")
    survivors = [
        f
        for f in files
        if f.loc >= MIN_CANDIDATE_LOC and f.def_count >= 1
    ]
    by_repo: dict[str, list[CandidateFile]] = {}
    for candidate in survivors:
        by_repo.setdefault(candidate.repo, []).append(candidate)
    kept: list[CandidateFile] = []
    for repo in sorted(by_repo):
        group = sorted(by_repo[repo], key=lambda c: c.path)
        if len(group) > per_repo_cap:
            rng = random.Random(f"{seed}:{repo}")
            group = sorted(rng.sample(group, per_repo_cap), key=lambda c: c.path)
        kept.extend(group)
    return kept


def render_harness_prompt(candidate: CandidateFile) -> str:
    return HARNESS_TEMPLATE.format(
        language=DISPLAY_NAMES[candidate.language],
        repo=candidate.repo,
        source=candidate.source,
        entry_point_instruction=ENTRY_POINT_INSTRUCTIONS[candidate.language],
    )


class MockGenerationClient:
    """Offline stand-in for a text-completion provider.

    Responses are keyed by the sha256 of the exact prompt, so a fixture
    prepared for one prompt can never leak onto another.
    """

    def __init__(self, canned: dict[str, str]):
        self.canned = dict(canned)

    @classmethod
    def for_prompts(cls, by_prompt: dict[str, str]) -> "MockGenerationClient":
        return cls(
            {
                hashlib.sha256(prompt.encode("utf-8")).hexdigest(): response
                for prompt, response in by_prompt.items()
            }
        )

    def complete(self, prompt: str) -> str:
        key = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        if key not in self.canned:
            raise GenerationClientError(f"no canned response for prompt {key[:12]}")
        return self.canned[key]


_FENCE = re.compile(r"^```[A-Za-z0-9_+-]*\s*\n(.*)\n```\s*$", re.DOTALL)


def strip_code_fences(text: str) -> str:
    """Remove one surrounding markdown fence, if present."""
    match = _FENCE.match(text.strip())
    if match:
        return match.group(1)
    return text


def _syntactic_check(source: str, language: Language, program_id: str) -> None:
    if language is Language.PYTHON:
        try:
            ast.parse(source)
        except SyntaxError as exc:
            raise NotCompilableError(f"{program_id}: {exc}") from exc
        return
    try:
        if language is Language.JAVASCRIPT:
            parse_js_subset(source, program_id)
        else:
            parse_java_unit(source)
    except UnsupportedConstructError as exc:
        raise NotCompilableError(f"{program_id}: {exc}") from exc


def program_id_for(repo: str, index: int) -> str:
    """<repo-short-name>_<4-digit-index>, sanitized to identifier chars."""
    short = repo.rsplit("/", 1)[-1]
    short = re.sub(r"[^A-Za-z0-9_]", "_", short) or "repo"
    if short[0].isdigit():
        short = "p_" + short
    return f"{short}_{index:04d}"


def generate_harness(
    candidate: CandidateFile, client, index: int = 0
) -> ProgramInstance:
    """Prompt the client and syntax-check the returned program."""
    prompt = render_harness_prompt(candidate)
    response = client.complete(prompt)
    source = strip_code_fences(response)
    if not source.endswith("\n"):
        source += "\n"
    program_id = program_id_for(candidate.repo, index)
    _syntactic_check(source, candidate.language, program_id)
    return ProgramInstance.create(
        program_id, candidate.language, source, candidate.repo
    )


def render_cot_prompt(
    instance: ProgramInstance, questions: str, ground_truth_answer: str
) -> str:
    """Fill the reasoning-trace template around the evaluation prompt."""
    if instance.ground_truth is None:
        raise MissingGroundTruthError(
            f"{instance.program_id}: reasoning traces need ground-truth answers"
        )
    user_prompt = EVAL_USER_TEMPLATE.format(
        language=DISPLAY_NAMES[instance.language],
        example=WORKED_EXAMPLES[instance.language],
        code=instance.source,
        questions=questions,
    )
    return COT_TEMPLATE.format(
        user_prompt=user_prompt, ground_truth_answer=ground_truth_answer
    )


def _repo_stratum(instances: list[ProgramInstance]) -> Language:
    """A repo's language stratum: majority language, ties by language tag."""
    counts: dict[Language, int] = {}
    for inst in instances:
        counts[inst.language] = counts.get(inst.language, 0) + 1
    return min(counts, key=lambda lang: (-counts[lang], lang.value))


def split_corpus(
    instances: list[ProgramInstance],
    test_fraction: float = DEFAULT_TEST_FRACTION,
    seed: int = 0,
) -> list[SplitAssignment]:
    """Repo-level stratified split; greedy fill of each language's quota."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be strictly between 0 and 1")
    by_repo: dict[str, list[ProgramInstance]] = {}
    for inst in instances:
        by_repo.setdefault(inst.repo, []).append(inst)

    strata: dict[Language, list[str]] = {}
    for repo, group in by_repo.items():
        strata.setdefault(_repo_stratum(group), []).append(repo)

    assignments: list[SplitAssignment] = []
    for language in sorted(strata, key=lambda lang: lang.value):
        repos = sorted(strata[language])
        stratum_size = sum(len(by_repo[r]) for r in repos)
        target = test_fraction * stratum_size
        rng = random.Random(f"{seed}:{language.value}")
        rng.shuffle(repos)
        test_count = 0
        test_repos = []
        for repo in repos:
            if test_count >= target:
                break
            test_repos.append(repo)
            test_count += len(by_repo[repo])
        if abs(test_count - target) > 2:
            raise DegenerateStratumError(
                f"{language.value}: greedy assignment reaches {test_count} test "
                f"instances against a target of {target:.1f}"
            )
        test_set = set(test_repos)
        for repo in repos:
            split = Split.TEST if repo in test_set else Split.TRAIN
            assignments.append(SplitAssignment(repo, split))
    assignments.sort(key=lambda a: a.repo)
    return assignments


def corpus_stats(
    instances: list[ProgramInstance],
    assignments: list[SplitAssignment] | None = None,
) -> dict:
    """Per-language table: program counts, function/edge/LOC mean and max.

    The synthetic toplevel entry is not counted as a function.
    """
    split_of = {a.repo: a.split for a in assignments} if assignments else {}
    table: dict[str, dict] = {}
    by_language: dict[Language, list[ProgramInstance]] = {}
    for inst in instances:
        if inst.ground_truth is None:
            raise MissingGroundTruthError(
                f"{inst.program_id}: stats need ground truth"
            )
        by_language.setdefault(inst.language, []).append(inst)

    def mean_max(values: list[int]) -> dict:
        if not values:
            return {"mean": 0.0, "max": 0}
        return {"mean": sum(values) / len(values), "max": max(values)}

    for language in sorted(by_language, key=lambda lang: lang.value):
        group = by_language[language]
        functions = [
            sum(1 for n in inst.ground_truth.functions if not n.is_toplevel())
            for inst in group
        ]
        edges = [len(inst.ground_truth.edges) for inst in group]
        locs = [inst.loc for inst in group]
        programs: dict[str, int] = {"total": len(group)}
        if assignments is not None:
            programs["test"] = sum(
                1 for inst in group if split_of.get(inst.repo) is Split.TEST
            )
            programs["train"] = sum(
                1 for inst in group if split_of.get(inst.repo) is Split.TRAIN
            )
        table[language.value] = {
            "programs": programs,
            "functions_per_program": mean_max(functions),
            "edges_per_program": mean_max(edges),
            "loc_per_program": mean_max(locs),
        }
    return table


def save_instance(
    corpus_dir: str | Path,
    instance: ProgramInstance,
    meta: dict,
    report=None,
) -> Path:
    """Write one instance directory; returns its path.

    report is an AcceptanceReport; when given, report.json is written and,
    if it was accepted, callgraph.json too.
    """
    inst_dir = Path(corpus_dir) / instance.language.value / instance.program_id
    inst_dir.mkdir(parents=True, exist_ok=True)
    ext = EXTENSIONS[instance.language]
    (inst_dir / f"program.{ext}").write_text(instance.source, encoding="utf-8")
    meta_doc = {"repo": instance.repo, **meta}
    (inst_dir / "meta.json").write_bytes(
        (json.dumps(meta_doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    )
    if report is not None:
        (inst_dir / "report.json").write_bytes(_serialize_report(report))
        if report.accepted:
            (inst_dir / "callgraph.json").write_bytes(
                serialize_callgraph(report.ground_truth)
            )
    return inst_dir


def load_instance(
    instance_dir: str | Path, with_ground_truth: bool = True
) -> tuple[ProgramInstance, dict]:
    """Read one instance directory back; ground truth attached if present.

    Stages that recompute the ground truth (validate, trace) pass
    with_ground_truth=False so a stale or corrupt callgraph.json cannot
    block them from replacing it.
    """
    inst_dir = Path(instance_dir)
    sources = sorted(
        p for ext in EXTENSIONS.values() for p in inst_dir.glob(f"program.{ext}")
    )
    if not sources:
        raise FileNotFoundError(f"no program.<ext> under {inst_dir}")
    source_path = sources[0]
    language = {v: k for k, v in EXTENSIONS.items()}[source_path.suffix[1:]]
    meta_path = inst_dir / "meta.json"
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    ground_truth: CallGraph | None = None
    graph_path = inst_dir / "callgraph.json"
    if with_ground_truth and graph_path.exists():
        ground_truth = deserialize_callgraph(graph_path.read_bytes())
    instance = ProgramInstance.create(
        inst_dir.name,
        language,
        source_path.read_text(encoding="utf-8"),
        meta.get("repo", ""),
        ground_truth,
    )
    return instance, meta


def load_corpus(corpus_dir: str | Path) -> list[tuple[ProgramInstance, dict]]:
    """Every saved instance under corpus_dir, ordered by (language, id)."""
    root = Path(corpus_dir)
    loaded: list[tuple[ProgramInstance, dict]] = []
    for language in sorted(Language, key=lambda lang: lang.value):
        lang_dir = root / language.value
        if not lang_dir.is_dir():
            continue
        for inst_dir in sorted(p for p in lang_dir.iterdir() if p.is_dir()):
            loaded.append(load_instance(inst_dir))
    return loaded


def write_splits(corpus_dir: str | Path, assignments: list[SplitAssignment]) -> Path:
    path = Path(corpus_dir) / "splits.json"
    doc = {a.repo: a.split.value for a in sorted(assignments, key=lambda a: a.repo)}
    path.write_bytes(
        (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    )
    return path


def read_splits(corpus_dir: str | Path) -> list[SplitAssignment]:
    doc = json.loads((Path(corpus_dir) / "splits.json").read_text())
    return [SplitAssignment(repo, Split(tag)) for repo, tag in sorted(doc.items())]


def write_stats(corpus_dir: str | Path, stats: dict) -> Path:
    path = Path(corpus_dir) / "stats.json"
    path.write_bytes(
        (json.dumps(stats, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    )
    return path
