# Inicialização do módulo repositories