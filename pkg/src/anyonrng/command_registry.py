import logging

LOG = logging.getLogger(__name__)


class CommandRegistryError(Exception):
    pass


class CommandRegistry(object):
    '''
    Maps sub-command names to :py:class:`~anyonrng.commands.command.Command`
    classes.

    Command classes register themselves by calling register() from
    :py:mod:`anyonrng.commands`. A name can only be registered once, though one
    class may serve several names through its ``COMMANDS`` list.
    '''

    COMMAND_MAPPING = None

    @classmethod
    def _ensure_loaded(cls):
        if cls.COMMAND_MAPPING is None:
            from . import commands

    @classmethod
    def register(cls, command_class):
        '''
        Register a Command class under every name in its ``COMMANDS`` list.

        :param command_class: The class to register
        :type command_class: :py:class:`~anyonrng.commands.command.Command`

        :return: None
        '''

        if cls.COMMAND_MAPPING is None:
            cls.COMMAND_MAPPING = {}

        for name in command_class.COMMANDS:

            if name in cls.COMMAND_MAPPING:
                raise CommandRegistryError("The command '{}' has already been registered with the class {}".format(name, cls.COMMAND_MAPPING[name]))

            LOG.debug("Registering command '{}' to class '{}'".format(name, command_class))
            cls.COMMAND_MAPPING[name] = command_class

    @classmethod
    def get_command_class(cls, name):
        '''
        Get the class registered for the sub-command ``name``.
        '''

        cls._ensure_loaded()
        command_class = cls.COMMAND_MAPPING.get(name, None)

        if command_class is None:
            raise CommandRegistryError("No class has been registered for the command '{}'".format(name))

        return command_class

    @classmethod
    def names(cls):
        cls._ensure_loaded()
        return list(cls.COMMAND_MAPPING)
