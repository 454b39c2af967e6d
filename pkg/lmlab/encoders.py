from fractions import Fraction

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from .calculus.expressions import ScalarExpr


class ReportJSONEncoder(DjangoJSONEncoder):
    def default(self, o):
        if isinstance(o, np.generic):
            return o.item()
        elif isinstance(o, np.ndarray):
            return o.tolist()
        elif isinstance(o, Fraction):
            return float(o)
        elif isinstance(o, ScalarExpr):  # Expressions print in the document grammar
            return str(o)

        return super(ReportJSONEncoder, self).default(o)
