"""Default role registry: the seven studio roles and their skills.

The four core roles (product manager, design director, CMF designer,
recorder) each own the stage skill that produces their stage's artifact;
the remaining three are free-chat participants a human can summon by name.
"""

from __future__ import annotations

from .domain import FREE_TEXT, ArtifactKind, RoleCard, RoleTitle, Skill, ToolKind

_CONTEXT_TAIL = """
{requirement}

{history}

{user_input}

{augmentations}

{format_rules}
"""


def _template(instructions: str) -> str:
    return instructions.rstrip() + "\n" + _CONTEXT_TAIL


CHAT_TEMPLATE = _template(
    "Contribute to the meeting from your own point of view. React to what was"
    " said, answer anything addressed to you, and keep the discussion moving."
)


def default_registry() -> list[RoleCard]:
    """The seven studio roles, named Xiao A through Xiao G."""
    return [
        RoleCard(
            id="product_manager",
            name="Xiao A",
            title=RoleTitle.PRODUCT_MANAGER.value,
            responsibilities=(
                "Sets the product direction and strategy. Analyzes the market and"
                " competing products, defines product features, scenarios and user"
                " personas, and turns user research into requirements the team can"
                " act on."
            ),
            skills=(
                Skill(
                    name="market_research",
                    prompt_template=_template(
                        "Research the market around the requirement and share the"
                        " findings that should shape this design."
                    ),
                    output_schema=FREE_TEXT,
                    tool=ToolKind.WEB_SEARCH.value,
                ),
                Skill(
                    name="analyze_requirements",
                    prompt_template=_template(
                        "Work through the design requirement and produce the"
                        " requirement analysis for this meeting: market notes, user"
                        " personas, and a clear product definition."
                    ),
                    output_schema=ArtifactKind.REQUIREMENT_ANALYSIS.value,
                    tool=ToolKind.TEXT_GEN.value,
                ),
            ),
        ),
        RoleCard(
            id="design_director",
            name="Xiao B",
            title=RoleTitle.DESIGN_DIRECTOR.value,
            responsibilities=(
                "Organizes the designers and finds design solutions. Frames the"
                " design problem, proposes candidate concepts, and curates which"
                " proposals go forward."
            ),
            skills=(
                Skill(
                    name="concept_discussion",
                    prompt_template=CHAT_TEMPLATE,
                    output_schema=FREE_TEXT,
                    tool=ToolKind.TEXT_GEN.value,
                ),
                Skill(
                    name="propose_schemes",
                    prompt_template=_template(
                        "Propose design schemes that answer the requirement analysis."
                        " Give each scheme a short title and a concrete concept"
                        " description; concept images will be generated for each one."
                    ),
                    output_schema=ArtifactKind.SCHEME_LIST.value,
                    tool=ToolKind.IMAGE_TXT2IMG.value,
                ),
            ),
        ),
        RoleCard(
            id="cmf_designer",
            name="Xiao C",
            title=RoleTitle.CMF_DESIGNER.value,
            responsibilities=(
                "Creates color and style schemes for various scenarios. Varies"
                " color, material and finishing over the chosen concepts while"
                " keeping their line work intact."
            ),
            skills=(
                Skill(
                    name="cmf_discussion",
                    prompt_template=CHAT_TEMPLATE,
                    output_schema=FREE_TEXT,
                    tool=ToolKind.TEXT_GEN.value,
                ),
                Skill(
                    name="draft_cmf_schemes",
                    prompt_template=_template(
                        "Build the CMF scheme list for the proposed schemes: for each"
                        " variant name the base scheme image, the color, the material"
                        " and the finishing. Variant renders will be generated from"
                        " the base image line work."
                    ),
                    output_schema=ArtifactKind.CMF_SCHEME_LIST.value,
                    tool=ToolKind.IMAGE_CANNY.value,
                ),
            ),
        ),
        RoleCard(
            id="recorder",
            name="Xiao D",
            title=RoleTitle.RECORDER.value,
            responsibilities=(
                "Documents meetings and assesses proposal feasibility. Scores the"
                " schemes, keeps the record straight, and compiles the final design"
                " plan."
            ),
            skills=(
                Skill(
                    name="meeting_notes",
                    prompt_template=CHAT_TEMPLATE,
                    output_schema=FREE_TEXT,
                    tool=ToolKind.TEXT_GEN.value,
                ),
                Skill(
                    name="write_evaluation",
                    prompt_template=_template(
                        "Evaluate every proposed scheme: note its feasibility and"
                        " score novelty, completeness and feasibility on the 1-7"
                        " scale."
                    ),
                    output_schema=ArtifactKind.EVALUATION_REPORT.value,
                    tool=ToolKind.TEXT_GEN.value,
                ),
                Skill(
                    name="compile_design_plan",
                    prompt_template=_template(
                        "Compile the final design plan: summarize the meeting's"
                        " outcome so the full document can be assembled from every"
                        " stage artifact."
                    ),
                    output_schema=ArtifactKind.DESIGN_PLAN.value,
                    tool=ToolKind.TEXT_GEN.value,
                ),
            ),
        ),
        RoleCard(
            id="virtual_user",
            name="Xiao E",
            title=RoleTitle.VIRTUAL_USER.value,
            responsibilities=(
                "Speaks for the target user: raises needs, reacts to proposals from"
                " the user's seat, and pushes back when a scheme drifts from real"
                " use."
            ),
            skills=(
                Skill(
                    name="user_feedback",
                    prompt_template=CHAT_TEMPLATE,
                    output_schema=FREE_TEXT,
                    tool=ToolKind.TEXT_GEN.value,
                ),
            ),
        ),
        RoleCard(
            id="boss",
            name="Xiao F",
            title=RoleTitle.BOSS.value,
            responsibilities=(
                "Owns the brief: raises the initial requirement, reviews direction"
                " against business goals, and signs off on where the work lands."
            ),
            skills=(
                Skill(
                    name="direction_review",
                    prompt_template=CHAT_TEMPLATE,
                    output_schema=FREE_TEXT,
                    tool=ToolKind.TEXT_GEN.value,
                ),
            ),
        ),
        RoleCard(
            id="technical_staff",
            name="Xiao G",
            title=RoleTitle.TECHNICAL_STAFF.value,
            responsibilities=(
                "Checks technical feasibility, flags manufacturing constraints, and"
                " iterates on implementation details when schemes need rework."
            ),
            skills=(
                Skill(
                    name="technical_review",
                    prompt_template=CHAT_TEMPLATE,
                    output_schema=FREE_TEXT,
                    tool=ToolKind.TEXT_GEN.value,
                ),
            ),
        ),
    ]


def core_roster() -> list[RoleCard]:
    """The four roles the default SOP assigns stage work to."""
    core = {t.value for t in (
        RoleTitle.PRODUCT_MANAGER,
        RoleTitle.DESIGN_DIRECTOR,
        RoleTitle.CMF_DESIGNER,
        RoleTitle.RECORDER,
    )}
    return [card for card in default_registry() if card.title in core]


def roles_by_id(role_ids: list[str] | None = None) -> list[RoleCard]:
    """Resolve registry ids to role cards; unknown ids raise ``KeyError``."""
    registry = {card.id: card for card in default_registry()}
    if role_ids is None:
        return core_roster()
    return [registry[rid] for rid in role_ids]
