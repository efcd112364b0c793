from couette_lab.lab.client import CouetteLab
from couette_lab.lab.fields import FieldsAPI
from couette_lab.lab.modes import ModesAPI
from couette_lab.lab.sweeps import SweepsAPI

__all__ = [
    "CouetteLab",
    "ModesAPI",
    "FieldsAPI",
    "SweepsAPI",
]
