"""Scaled integer arithmetic for OR-Tools models of real-valued costs."""

import math

from ortools.sat.python import cp_model


class ScaledOps:
    """Fixed-point helpers for CP-SAT, which only handles integers."""
    def __init__(self, scaling_factor: int) -> None:
        """Constructs a ScaledOps object.

        :param scaling_factor: The number of digits to scale decimals by.
        """
        self.scaling_factor = scaling_factor

    @property
    def scale(self) -> int:
        return 10 ** self.scaling_factor

    def ceil(self, value: float) -> int:
        """Scales a real value up to the next integer.

        :param value: A real value.
        :return: ceil(value * 10^d).
        """
        return math.ceil(value * self.scale)

    def product(
            self,
            model: cp_model.CpModel,
            a: cp_model.LinearExprT,
            b: cp_model.LinearExprT,
            upper: int,
            name: str
    ) -> cp_model.IntVar:
        """Creates a variable equal to the product of two non-negative expressions.

        :param model: The model to add the variable to.
        :param a: A factor.
        :param b: Another factor.
        :param upper: An upper bound of the product.
        :param name: The variable name.
        :return: The product variable.
        """
        target = model.new_int_var(0, upper, name)
        model.add_multiplication_equality(target, [a, b])
        return target

    def scaled_div(
            self,
            model: cp_model.CpModel,
            num: cp_model.LinearExprT,
            denom: int,
            upper: int,
            name: str
    ) -> cp_model.IntVar:
        """Creates a variable equal to floor(num * 10^d / denom).

        :param model: The model to add the variable to.
        :param num: The non-negative numerator.
        :param denom: The positive constant denominator.
        :param upper: An upper bound of the unscaled numerator.
        :param name: The variable name.
        :return: The scaled quotient variable.
        """
        num_scaled = model.new_int_var(0, upper * self.scale, name + "_scaled")
        model.add(num_scaled == num * self.scale)
        target = model.new_int_var(0, upper * self.scale // denom, name)
        model.add_division_equality(target, num_scaled, denom)
        return target
