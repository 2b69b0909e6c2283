import pytest

from feedfilter.corpus import Message, SurveySet, UserResponse
from feedfilter.synthpop import GenConfig, generate


def make_message(msg_id: str, text: str = "some words here", annotations=(7,)) -> Message:
    return Message(id=msg_id, text=text, annotations=tuple(annotations))


def make_survey(vote_lists, raters_per_message=5, items_per_user=75) -> SurveySet:
    """Survey with one message per vote list; votes are (intensity, filter)
    pairs or plain filter booleans (intensity then defaults to 3)."""
    messages = []
    responses = []
    for m_idx, votes in enumerate(vote_lists):
        msg_id = f"m{m_idx}"
        messages.append(make_message(msg_id, text=f"message {m_idx} text"))
        for u_idx, vote in enumerate(votes):
            if isinstance(vote, tuple):
                intensity, choice = vote
            else:
                intensity, choice = 3, vote
            responses.append(
                UserResponse(
                    user_id=f"u{u_idx}",
                    message_id=msg_id,
                    intensity=intensity,
                    filter=choice,
                )
            )
    return SurveySet(
        messages=tuple(messages),
        responses=tuple(responses),
        raters_per_message=raters_per_message,
        items_per_user=items_per_user,
    )


@pytest.fixture(scope="session")
def default_population():
    """The default synthetic population used by the directional criteria."""
    return generate(GenConfig(n_users=60, n_messages=900, seed=7))
