__name__ = "lmlab"
__author__ = "Pivotal Energy Solutions"
__version_info__ = (1, 0, 0)
__version__ = "1.0.0"
__date__ = "2026/10/18 9:00:00 AM"
__credits__ = ["Steven Klass", "Autumn Valenta"]
__license__ = "See the file LICENSE.txt for licensing information."
