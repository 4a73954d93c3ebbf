import graphene
from graphql import GraphQLError

from fpa_learning.consts import LEARNER_FTL, TIEBREAK_EXAMPLE1
from fpa_learning.dynamics import RunConfig, classify_convergence, run, time_average_ne_fraction
from fpa_learning.equilibria import enumerate_pure_nash, find_equilibria
from fpa_learning.exceptions import FpaLearningError
from fpa_learning.learners import EpsilonSchedule, LearnerSpec, with_example1_tiebreak
from fpa_learning.types import ValueProfile


class EquilibriaType(graphene.ObjectType):
    profiles = graphene.List(graphene.List(graphene.Int))
    method = graphene.String()
    agreement = graphene.Boolean()


class Query(graphene.ObjectType):
    equilibria = graphene.Field(
        EquilibriaType,
        values=graphene.List(graphene.NonNull(graphene.Int), required=True),
        cap=graphene.Int(),
        method=graphene.String(default_value="closed"),
    )

    def resolve_equilibria(self, info, values, cap=None, method="closed"):
        try:
            ne, agreement = find_equilibria(ValueProfile(tuple(values), cap), method)
        except FpaLearningError as e:
            raise GraphQLError(str(e))

        return EquilibriaType(profiles=[list(profile) for profile in ne], method=method, agreement=agreement)


class LearnerInput(graphene.InputObjectType):
    kind = graphene.String(required=True)
    tiebreak = graphene.String()
    script = graphene.List(graphene.NonNull(graphene.Int))
    eps_exponent = graphene.Float()
    eps_scale = graphene.Float()
    t0 = graphene.Int()


class SimulateInput(graphene.InputObjectType):
    values = graphene.List(graphene.NonNull(graphene.Int), required=True)
    cap = graphene.Int()
    rounds = graphene.Int(required=True)
    seed = graphene.BigInt()
    algo = graphene.String()
    tiebreak = graphene.String()
    learners = graphene.List(graphene.NonNull(LearnerInput))


def _learner_spec(data, tiebreak=None):
    return LearnerSpec(
        kind=data.get("kind") or LEARNER_FTL,
        schedule=EpsilonSchedule(data.get("eps_exponent") or 0.5, data.get("eps_scale") or 1.0),
        tiebreak=tiebreak or data.get("tiebreak") or "lowest",
        script=tuple(data.get("script") or ()),
        t0=data.get("t0") or 1000,
    )


def run_config_from_input(input) -> RunConfig:
    values = ValueProfile(tuple(input["values"]), input.get("cap"))
    tiebreak = input.get("tiebreak")
    example1 = tiebreak == TIEBREAK_EXAMPLE1
    if example1:
        tiebreak = None

    if input.get("learners"):
        learners = tuple(_learner_spec(data, tiebreak) for data in input["learners"])
    else:
        learners = (_learner_spec({"kind": input.get("algo")}, tiebreak),) * values.n

    if example1:
        learners = with_example1_tiebreak(values, learners)

    return RunConfig(values, learners, rounds=input["rounds"], seed=input.get("seed") or 0)


class Simulate(graphene.Mutation):
    class Arguments:
        input = SimulateInput(required=True)

    verdict = graphene.String()
    terminal_frequencies = graphene.List(graphene.List(graphene.Float))
    ne_fraction = graphene.Float()
    rounds = graphene.Int()
    last_profile = graphene.List(graphene.Int)
    wins = graphene.List(graphene.Int)

    @classmethod
    def before_mutate(cls, root, info, input):
        return None

    @classmethod
    def validate(cls, root, info, input):
        if input["rounds"] < 1:
            raise GraphQLError(f"A run needs at least one round, got {input['rounds']}.")

    @classmethod
    def after_mutate(cls, root, info, input, record, return_data):
        return None

    @classmethod
    def mutate(cls, root, info, input):
        updated_input = cls.before_mutate(root, info, input)
        if updated_input:
            input = updated_input

        cls.validate(root, info, input)

        try:
            config = run_config_from_input(input)
            record = run(config)
            ne = enumerate_pure_nash(config.values)
        except FpaLearningError as e:
            raise GraphQLError(str(e))

        return_data = {
            "verdict": classify_convergence(record).outcome.value,
            "terminal_frequencies": [f.tolist() for f in record.terminal_frequencies],
            "ne_fraction": float(time_average_ne_fraction(record, ne)[-1]),
            "rounds": record.rounds,
            "last_profile": list(record.profile(record.rounds)),
            "wins": list(record.wins),
        }
        cls.after_mutate(root, info, input, record, return_data)

        return cls(**return_data)


class Mutation(graphene.ObjectType):
    simulate = Simulate.Field()


schema = graphene.Schema(query=Query, mutation=Mutation)
