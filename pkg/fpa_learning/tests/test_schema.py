from addict import Dict
from django.test import SimpleTestCase

from fpa_learning.schema import schema


class TestEquilibriaQuery(SimpleTestCase):
    query = """
        query Equilibria($values: [Int!]!, $method: String){
            equilibria(values: $values, method: $method){
                profiles
                method
                agreement
            }
        }
    """

    def test__closed_form(self):
        result = schema.execute(self.query, variables={"values": [4, 4]})
        self.assertIsNone(result.errors)
        data = Dict(result.data)

        self.assertEqual([[2, 2], [3, 3]], data.equilibria.profiles)
        self.assertEqual("closed", data.equilibria.method)
        self.assertIsNone(data.equilibria.agreement)

    def test__both_methods__agree(self):
        result = schema.execute(self.query, variables={"values": [3, 2, 2], "method": "both"})
        self.assertIsNone(result.errors)
        data = Dict(result.data)

        self.assertTrue(data.equilibria.agreement)

    def test__invalid_values__is_an_error(self):
        result = schema.execute(self.query, variables={"values": [0, 4]})

        self.assertIsNotNone(result.errors)

    def test__unknown_method__is_an_error(self):
        result = schema.execute(self.query, variables={"values": [4, 4], "method": "guess"})

        self.assertIsNotNone(result.errors)


class TestSimulateMutation(SimpleTestCase):
    mutation = """
        mutation Simulate($input: SimulateInput!){
            simulate(input: $input){
                verdict
                terminalFrequencies
                neFraction
                rounds
                lastProfile
                wins
            }
        }
    """

    def test__example1_cycle(self):
        result = schema.execute(
            self.mutation,
            variables={"input": {"values": [10, 7, 7], "rounds": 9, "algo": "ftl", "tiebreak": "example1"}},
        )
        self.assertIsNone(result.errors)
        data = Dict(result.data)

        self.assertEqual("not_converged", data.simulate.verdict)
        self.assertEqual(9, data.simulate.rounds)
        self.assertEqual([7, 1, 1], data.simulate.lastProfile)
        self.assertEqual([9, 0, 0], data.simulate.wins)
        self.assertAlmostEqual(2 / 3, data.simulate.neFraction)

    def test__per_bidder_learners(self):
        result = schema.execute(
            self.mutation,
            variables={
                "input": {
                    "values": [4, 4],
                    "rounds": 100,
                    "learners": [{"kind": "ftl"}, {"kind": "scripted", "script": [3]}],
                }
            },
        )
        self.assertIsNone(result.errors)
        data = Dict(result.data)

        self.assertEqual(1.0, data.simulate.terminalFrequencies[1][3])
        self.assertEqual(3, data.simulate.lastProfile[1])

    def test__no_rounds__is_an_error(self):
        result = schema.execute(self.mutation, variables={"input": {"values": [4, 4], "rounds": 0}})

        self.assertIsNotNone(result.errors)

    def test__unknown_learner__is_an_error(self):
        result = schema.execute(
            self.mutation, variables={"input": {"values": [4, 4], "rounds": 5, "algo": "fictitious-play"}}
        )

        self.assertIsNotNone(result.errors)
